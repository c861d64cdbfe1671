//! Angle parameterizations of unitaries and the adversary spaces searched by
//! the optimizer.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::protocols::honest::{self, encode};
use crate::protocols::{wires, EncodingFamily, Op, Reg, StrategySpec, Verdict, COINFLIP_THETA, MAX_ANCILLAS};
use crate::qmath::matrix::unitary_with_first_column;
use crate::qmath::{CMatrix, Cplx, OrthogonalMeasurement};

use super::quadratic::bob_holding_unitary;

/// Number of angles taken by [`unitary_from_angles`].
pub fn angle_count(dim: usize) -> usize {
    dim * dim - 1
}

/// Givens rotation on coordinates `(i, j)`.
fn givens(dim: usize, i: usize, j: usize, theta: f64, phi: f64) -> CMatrix {
    let mut g = CMatrix::identity(dim);
    let (s, c) = theta.sin_cos();
    g[(i, i)] = Cplx::new(c, 0.0);
    g[(j, j)] = Cplx::new(c, 0.0);
    g[(i, j)] = -Cplx::from_polar(s, -phi);
    g[(j, i)] = Cplx::from_polar(s, phi);
    g
}

fn givens_product(dim: usize, angles: &[f64]) -> CMatrix {
    let mut u = CMatrix::identity(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            u = u.matmul(&givens(dim, i, j, angles[k], angles[k + 1]));
            k += 2;
        }
    }
    u
}

/// `dim × dim` unitary from `dim² − 1` angles.
///
/// Layout: for each pair `i < j` in lexicographic order a rotation angle
/// `θ_ij` and a phase `φ_ij`, then `dim − 1` diagonal phases `δ_1…`. The
/// result is `diag(1, e^{iδ_1}, …) · Π G_ij(θ_ij, φ_ij)` where `G_ij` acts as
/// `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]` on `(i, j)`. This covers
/// the unitary group up to a global phase; `(θ, 0, 0)` in dimension 2 is the
/// real rotation by `θ`.
pub fn unitary_from_angles(dim: usize, angles: &[f64]) -> Result<CMatrix> {
    let expected = angle_count(dim);
    if angles.len() != expected {
        return Err(Error::BadParameterCount {
            expected,
            got: angles.len(),
        });
    }
    let pairs = dim * (dim - 1);
    let u = givens_product(dim, &angles[..pairs]);
    let mut phases = vec![Cplx::new(1.0, 0.0)];
    phases.extend(angles[pairs..].iter().map(|&d| Cplx::from_polar(1.0, d)));
    Ok(CMatrix::diag(&phases).matmul(&u))
}

/// Bob strategy for the escrow game applying the unitary of `angles` to
/// `(deposit ⊗ ancillas)` while holding the deposit; `dim` must be
/// `2^(1 + ancillas)`.
pub fn parameterize(dim: usize, angles: &[f64]) -> Result<StrategySpec> {
    if !dim.is_power_of_two() || !(2..=1 << (MAX_ANCILLAS + 1)).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension {dim}")));
    }
    let u = unitary_from_angles(dim, angles)?;
    let ancillas = dim.trailing_zeros() as usize - 1;
    Ok(bob_holding_unitary("bob-parameterized", u, ancillas))
}

/// Unit vector from `2·dim − 2` angles: `dim − 1` hyperspherical angles
/// followed by `dim − 1` relative phases.
pub fn state_from_angles(dim: usize, angles: &[f64]) -> Result<Vec<Cplx>> {
    let expected = 2 * dim - 2;
    if angles.len() != expected {
        return Err(Error::BadParameterCount {
            expected,
            got: angles.len(),
        });
    }
    let (mag, ph) = angles.split_at(dim - 1);
    let mut out = Vec::with_capacity(dim);
    let mut rest = 1.0;
    for (k, &a) in mag.iter().enumerate() {
        let r = rest * a.cos();
        rest *= a.sin();
        let phase = if k == 0 { 0.0 } else { ph[k - 1] };
        out.push(Cplx::from_polar(r, phase));
    }
    out.push(Cplx::from_polar(rest, ph[dim - 2]));
    Ok(out)
}

type Builder = dyn Fn(&[f64]) -> Result<StrategySpec> + Send + Sync;

/// A box of angle parameters mapped to strategies.
#[derive(Clone)]
pub struct AdversarySpace {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    build: Arc<Builder>,
}

impl std::fmt::Debug for AdversarySpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdversarySpace")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish()
    }
}

fn unitary_bounds(dim: usize) -> Vec<(f64, f64)> {
    let mut b = Vec::new();
    for _ in 0..dim * (dim - 1) / 2 {
        b.push((0.0, FRAC_PI_2));
        b.push((0.0, 2.0 * PI));
    }
    b.extend(std::iter::repeat_n((0.0, 2.0 * PI), dim - 1));
    b
}

fn state_bounds(dim: usize) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, FRAC_PI_2); dim - 1];
    b.extend(std::iter::repeat_n((0.0, 2.0 * PI), dim - 1));
    b
}

impl AdversarySpace {
    pub fn new(
        name: &str,
        bounds: Vec<(f64, f64)>,
        build: impl Fn(&[f64]) -> Result<StrategySpec> + Send + Sync + 'static,
    ) -> Self {
        AdversarySpace {
            name: name.to_string(),
            bounds,
            build: Arc::new(build),
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn build(&self, params: &[f64]) -> Result<StrategySpec> {
        if params.len() != self.dim() {
            return Err(Error::BadParameterCount {
                expected: self.dim(),
                got: params.len(),
            });
        }
        (self.build)(params)
    }

    /// A space with no parameters.
    pub fn fixed(spec: StrategySpec) -> Self {
        let name = spec.name.clone();
        AdversarySpace::new(&name, Vec::new(), move |_| Ok(spec.clone()))
    }

    /// Escrow Bob applying an arbitrary unitary on deposit plus
    /// `ancillas` qubits ([`parameterize`]).
    pub fn escrow_bob(ancillas: usize) -> Self {
        let dim = 2usize << ancillas;
        AdversarySpace::new(
            &format!("escrow-bob-u{dim}"),
            unitary_bounds(dim),
            move |a| parameterize(dim, a),
        )
    }

    /// Coin-flip Alice depositing an arbitrary two-qubit state on
    /// `(A.anc0, dep)`. After learning `b′` she announces `b = ¬b′` and the
    /// index read off her ancilla (6 angles).
    pub fn coinflip_alice_state() -> Self {
        AdversarySpace::new("coinflip-alice-6", state_bounds(4), |a| {
            coinflip_alice(a, None)
        })
    }

    /// As [`coinflip_alice_state`](Self::coinflip_alice_state) plus a
    /// single-qubit unitary on the ancilla for each announced bit before
    /// reading the index (12 angles).
    pub fn coinflip_alice_full() -> Self {
        let mut bounds = state_bounds(4);
        bounds.extend(unitary_bounds(2));
        bounds.extend(unitary_bounds(2));
        AdversarySpace::new("coinflip-alice-12", bounds, |a| {
            let v0 = unitary_from_angles(2, &a[6..9])?;
            let v1 = unitary_from_angles(2, &a[9..12])?;
            coinflip_alice(&a[..6], Some([v0, v1]))
        })
    }

    /// Coin-flip Bob measuring the deposit in an arbitrary basis and using
    /// the outcome as `b′` (3 angles).
    pub fn coinflip_bob_basis() -> Self {
        AdversarySpace::new("coinflip-bob-3", unitary_bounds(2), |a| {
            let u = unitary_from_angles(2, a)?;
            Ok(coinflip_bob(u, 0))
        })
    }

    /// Coin-flip Bob applying a Givens product (no diagonal phases) to
    /// `(dep, B.anc0)` and reading `b′` off the ancilla (12 angles).
    pub fn coinflip_bob_givens() -> Self {
        let bounds: Vec<(f64, f64)> = unitary_bounds(4).into_iter().take(12).collect();
        AdversarySpace::new("coinflip-bob-12", bounds, |a| {
            let u = givens_product(4, a);
            Ok(coinflip_bob(u, 1))
        })
    }
}

fn flip_family() -> EncodingFamily {
    EncodingFamily::four_state(COINFLIP_THETA)
}

fn coinflip_alice(state: &[f64], rotations: Option<[CMatrix; 2]>) -> Result<StrategySpec> {
    let psi = state_from_angles(4, state)?;
    let prep = unitary_with_first_column(&psi)?;
    let regs = vec![Reg::Anc(0), Reg::msg(wires::DEPOSIT)];
    let idx = wires::index(1);
    let reveal = vec![
        Op::receive(wires::CHOICE, "bp"),
        Op::branch(
            "bp",
            (0..2)
                .map(|bp| {
                    let b = 1 - bp;
                    let mut ops = Vec::new();
                    if let Some(v) = &rotations {
                        ops.push(Op::unitary(vec![Reg::Anc(0)], v[b].clone()));
                    }
                    ops.push(Op::measure(
                        vec![Reg::Anc(0)],
                        OrthogonalMeasurement::computational(1),
                        "x",
                    ));
                    if b == 1 {
                        ops.push(Op::unitary(
                            vec![Reg::msg(wires::BIT)],
                            crate::qmath::gates::pauli_x(),
                        ));
                    }
                    ops.push(encode("x", &idx));
                    ops.push(Op::Declare(Verdict::One));
                    ops
                })
                .collect(),
        ),
    ];
    Ok(StrategySpec::new("coinflip-alice-param", 1)
        .with_round("deposit", vec![Op::unitary(regs, prep)])
        .with_round("reveal", reveal))
}

/// Bob applying `u` then measuring the last of `(dep, B.anc0, …)` to get `b′`.
fn coinflip_bob(u: CMatrix, ancillas: usize) -> StrategySpec {
    let mut regs = vec![Reg::msg(wires::DEPOSIT)];
    regs.extend((0..ancillas).map(Reg::Anc));
    let target = regs.last().cloned().expect("nonempty");
    let choose = vec![
        Op::unitary(regs, u),
        Op::measure(vec![target], OrthogonalMeasurement::computational(1), "bp"),
        encode("bp", &[wires::CHOICE.to_string()]),
    ];
    let verify = honest::coinflip_bob(&flip_family()).round("verify").to_vec();
    StrategySpec::new("coinflip-bob-param", ancillas)
        .with_round("choose", choose)
        .with_round("verify", verify)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::gates;
    use crate::qmath::random::seeded;
    use rand::Rng;

    #[test]
    fn zero_angles_identity() {
        for dim in [2, 4, 8] {
            let u = unitary_from_angles(dim, &vec![0.0; angle_count(dim)]).unwrap();
            assert!(u.max_abs_diff(&CMatrix::identity(dim)) < 1e-15);
        }
        let spec = parameterize(4, &[0.0; 15]).unwrap();
        assert_eq!(spec.ancillas, 1);
        spec.validate().unwrap();
    }

    #[test]
    fn single_qubit_rotation() {
        for t in [0.1, 0.7, 1.3] {
            let u = unitary_from_angles(2, &[t, 0.0, 0.0]).unwrap();
            assert!(u.max_abs_diff(&gates::rotation(t)) < 1e-15);
        }
    }

    #[test]
    fn random_angles_unitary() {
        let mut rng = seeded(3);
        for dim in [2, 4, 8] {
            for _ in 0..10 {
                let a: Vec<f64> = (0..angle_count(dim)).map(|_| rng.random_range(-7.0..7.0)).collect();
                assert!(unitary_from_angles(dim, &a).unwrap().unitary_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_counts() {
        assert!(matches!(
            unitary_from_angles(2, &[0.0; 2]),
            Err(Error::BadParameterCount { expected: 3, got: 2 })
        ));
        assert!(matches!(
            parameterize(4, &[0.0; 3]),
            Err(Error::BadParameterCount { expected: 15, got: 3 })
        ));
        assert!(parameterize(3, &[0.0; 8]).is_err());
    }

    #[test]
    fn states_normalized() {
        let mut rng = seeded(4);
        for _ in 0..20 {
            let a: Vec<f64> = (0..6).map(|_| rng.random_range(-4.0..4.0)).collect();
            let v = state_from_angles(4, &a).unwrap();
            assert!((crate::qmath::norm(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spaces_build_valid_strategies() {
        let mut rng = seeded(5);
        for space in [
            AdversarySpace::escrow_bob(1),
            AdversarySpace::coinflip_alice_state(),
            AdversarySpace::coinflip_alice_full(),
            AdversarySpace::coinflip_bob_basis(),
            AdversarySpace::coinflip_bob_givens(),
        ] {
            let p: Vec<f64> = space
                .bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect();
            space.build(&p).unwrap().validate().unwrap();
        }
        assert_eq!(AdversarySpace::coinflip_alice_state().dim(), 6);
        assert_eq!(AdversarySpace::coinflip_alice_full().dim(), 12);
        assert_eq!(AdversarySpace::coinflip_bob_basis().dim(), 3);
        assert_eq!(AdversarySpace::coinflip_bob_givens().dim(), 12);
    }
}
