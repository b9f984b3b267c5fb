//! Exact two-qubit simulation of the entangle / local-operation / disentangle
//! protocol, over the ordered basis `(CC, CD, DC, DD)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scr::Agent;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

/// Slack allowed on parameter range checks.
const RANGE_SLACK: f64 = 1e-12;
/// Largest normalization defect accepted by [`collapse_distribution`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Name recorded in run reports for the collapse sampler.
pub const COLLAPSE_RNG: &str =
    "ChaCha20Rng::seed_from_u64 (rand_chacha 0.9), u = (next_u64 >> 11) * 2^-53";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// State of one coin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coin {
    C,
    D,
}

/// Collapsed two-coin state; the first letter is agent 1's coin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    CC,
    CD,
    DC,
    DD,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::CC, Basis::CD, Basis::DC, Basis::DD];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Basis {
        Basis::ALL[i]
    }

    pub fn from_coins(c1: Coin, c2: Coin) -> Basis {
        match (c1, c2) {
            (Coin::C, Coin::C) => Basis::CC,
            (Coin::C, Coin::D) => Basis::CD,
            (Coin::D, Coin::C) => Basis::DC,
            (Coin::D, Coin::D) => Basis::DD,
        }
    }

    pub fn coin(self, j: Agent) -> Coin {
        let bit = match j {
            Agent::One => self.index() >> 1,
            Agent::Two => self.index() & 1,
        };
        if bit == 0 {
            Coin::C
        } else {
            Coin::D
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A local operation `ω(ξ, φ)` with `ξ ∈ [0, π]`, `φ ∈ [0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOp {
    pub xi: f64,
    pub phi: f64,
}

impl LocalOp {
    /// Not flip.
    pub const I: LocalOp = LocalOp { xi: 0.0, phi: 0.0 };
    /// Flip.
    pub const D: LocalOp = LocalOp {
        xi: PI,
        phi: FRAC_PI_2,
    };
    pub const C: LocalOp = LocalOp {
        xi: 0.0,
        phi: FRAC_PI_2,
    };

    pub fn new(xi: f64, phi: f64) -> Result<Self> {
        let op = LocalOp { xi, phi };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi >= -RANGE_SLACK && self.xi <= PI + RANGE_SLACK) {
            return Err(Error::OutOfRange(format!("ξ = {} not in [0, π]", self.xi)));
        }
        if !(self.phi >= -RANGE_SLACK && self.phi <= FRAC_PI_2 + RANGE_SLACK) {
            return Err(Error::OutOfRange(format!(
                "φ = {} not in [0, π/2]",
                self.phi
            )));
        }
        Ok(())
    }
}

/// `[[e^{iφ}cos(ξ/2), i sin(ξ/2)], [i sin(ξ/2), e^{−iφ}cos(ξ/2)]]`.
pub fn strategy_matrix(op: LocalOp) -> Result<Mat2> {
    op.validate()?;
    let (s, c) = (op.xi / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, op.phi);
    Ok([[phase * c, I * s], [I * s, phase.conj() * c]])
}

/// The entangling gate `J = cos(γ/2) I⊗I + i sin(γ/2) σx⊗σx`, `γ ∈ [0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entangler {
    pub gamma: f64,
}

impl Entangler {
    /// Maximal entanglement, `γ = π/2`.
    pub const MAX: Entangler = Entangler { gamma: FRAC_PI_2 };

    pub fn new(gamma: f64) -> Result<Self> {
        let e = Entangler { gamma };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= -RANGE_SLACK && self.gamma <= FRAC_PI_2 + RANGE_SLACK) {
            return Err(Error::OutOfRange(format!(
                "γ = {} not in [0, π/2]",
                self.gamma
            )));
        }
        Ok(())
    }

    fn half_angle(&self) -> (f64, f64) {
        let (s, c) = (self.gamma / 2.0).sin_cos();
        (c, s)
    }
}

pub fn entangler_matrix(e: Entangler) -> Result<Mat4> {
    e.validate()?;
    let (c, s) = e.half_angle();
    let c = Complex64::new(c, 0.0);
    let s = I * s;
    Ok([
        [c, ZERO, ZERO, s],
        [ZERO, c, s, ZERO],
        [ZERO, s, c, ZERO],
        [s, ZERO, ZERO, c],
    ])
}

/// A normalized two-coin state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub amplitudes: [Complex64; 4],
}

impl QuantumState {
    pub const CC: QuantumState = QuantumState {
        amplitudes: [ONE, ZERO, ZERO, ZERO],
    };

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, b: Basis) -> Complex64 {
        self.amplitudes[b.index()]
    }

    fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for a in self.amplitudes.iter_mut() {
            *a /= n;
        }
        self
    }
}

/// `J|CC⟩ = (cos(γ/2), 0, 0, i sin(γ/2))`.
pub fn entangled_start(e: Entangler) -> Result<QuantumState> {
    e.validate()?;
    let (c, s) = e.half_angle();
    Ok(QuantumState {
        amplitudes: [Complex64::new(c, 0.0), ZERO, ZERO, I * s],
    })
}

/// The leftmost and rightmost columns of `ω1 ⊗ ω2`. `J|CC⟩` lives on `CC`
/// and `DD`, so no other column is ever needed.
pub fn outer_columns(op1: LocalOp, op2: LocalOp) -> Result<([Complex64; 4], [Complex64; 4])> {
    let w1 = strategy_matrix(op1)?;
    let w2 = strategy_matrix(op2)?;
    let col = |k: usize| {
        [
            w1[0][k] * w2[0][k],
            w1[0][k] * w2[1][k],
            w1[1][k] * w2[0][k],
            w1[1][k] * w2[1][k],
        ]
    };
    Ok((col(0), col(1)))
}

/// `|ψ3⟩ = J†(ω1 ⊗ ω2)J|CC⟩`.
pub fn final_state(e: Entangler, op1: LocalOp, op2: LocalOp) -> Result<QuantumState> {
    let start = entangled_start(e)?;
    let (left, right) = outer_columns(op1, op2)?;
    let (c0, c3) = (start.amplitudes[0], start.amplitudes[3]);
    let mut psi2 = [ZERO; 4];
    for k in 0..4 {
        psi2[k] = left[k] * c0 + right[k] * c3;
    }
    // J† = cos(γ/2) I − i sin(γ/2) σx⊗σx, and σx⊗σx maps basis index k to 3 − k
    let (c, s) = e.half_angle();
    let mut psi3 = [ZERO; 4];
    for k in 0..4 {
        psi3[k] = psi2[k] * c - I * s * psi2[3 - k];
    }
    Ok(QuantumState { amplitudes: psi3 }.normalized())
}

/// Outcome probabilities over `(CC, CD, DC, DD)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseDistribution {
    pub probabilities: [f64; 4],
}

impl CollapseDistribution {
    pub fn new(probabilities: [f64; 4]) -> Result<Self> {
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "invalid probabilities {probabilities:?}"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(CollapseDistribution { probabilities })
    }

    pub fn probability(&self, b: Basis) -> f64 {
        self.probabilities[b.index()]
    }

    /// `Σ p_b · values[b]`.
    pub fn expectation(&self, values: &[f64; 4]) -> f64 {
        self.probabilities
            .iter()
            .zip(values)
            .map(|(p, v)| p * v)
            .sum()
    }
}

pub fn collapse_distribution(st: &QuantumState) -> Result<CollapseDistribution> {
    let n = st.norm_sqr();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "state is not normalized: ‖ψ‖² = {n}"
        )));
    }
    Ok(CollapseDistribution {
        probabilities: st.amplitudes.map(|a| a.norm_sqr()),
    })
}

/// A seeded stream of collapse draws.
pub struct CollapseSampler {
    rng: ChaCha20Rng,
}

impl CollapseSampler {
    pub fn new(seed: u64) -> Self {
        CollapseSampler {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// A uniform draw in `[0, 1)` with 53 random bits.
    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn sample(&mut self, d: &CollapseDistribution) -> Basis {
        let u = self.unit();
        let mut acc = 0.0;
        for b in Basis::ALL {
            let p = d.probability(b);
            acc += p;
            if p > 0.0 && u < acc {
                return b;
            }
        }
        // rounding left u above the running total: take the last possible state
        Basis::ALL
            .into_iter()
            .rev()
            .find(|b| d.probability(*b) > 0.0)
            .unwrap_or(Basis::CC)
    }
}

/// One draw from `d` with a fresh generator seeded by `seed`.
pub fn sample_collapse(d: &CollapseDistribution, seed: u64) -> Basis {
    CollapseSampler::new(seed).sample(d)
}

/// Dense 2×2 / 4×4 helpers, used as the reference route in tests.
pub mod dense {
    use super::{Mat2, Mat4, QuantumState, ZERO};
    use num_complex::Complex64;

    pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
            }
        }
        out
    }

    pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    pub fn adjoint(a: &Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = a[j][i].conj();
            }
        }
        out
    }

    pub fn apply(a: &Mat4, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|k| a[i][k] * v[k]).sum();
        }
        out
    }

    /// `J†(ω1 ⊗ ω2)J|CC⟩` by full matrix products.
    pub fn final_state(j: &Mat4, w1: &Mat2, w2: &Mat2) -> QuantumState {
        let u = mul(&adjoint(j), &mul(&kron(w1, w2), j));
        QuantumState {
            amplitudes: apply(&u, &QuantumState::CC.amplitudes),
        }
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_defect<const N: usize>(u: &[[Complex64; N]; N]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += u[k][i].conj() * u[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= TOL
    }

    #[test]
    fn named_strategies() {
        let id = strategy_matrix(LocalOp::I).unwrap();
        assert!(close(id[0][0], ONE) && close(id[1][1], ONE) && close(id[0][1], ZERO));
        let d = strategy_matrix(LocalOp::D).unwrap();
        assert!(
            close(d[0][0], ZERO) && close(d[0][1], I) && close(d[1][0], I) && close(d[1][1], ZERO)
        );
        let c = strategy_matrix(LocalOp::C).unwrap();
        assert!(close(c[0][0], I) && close(c[1][1], -I) && close(c[0][1], ZERO));
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(LocalOp::new(-0.1, 0.0).is_err());
        assert!(LocalOp::new(0.0, 2.0).is_err());
        assert!(strategy_matrix(LocalOp { xi: 4.0, phi: 0.0 }).is_err());
        assert!(Entangler::new(1.6).is_err());
        assert!(entangler_matrix(Entangler { gamma: -1.0 }).is_err());
    }

    #[test]
    fn entangler_special_cases() {
        let j0 = entangler_matrix(Entangler::new(0.0).unwrap()).unwrap();
        for (i, row) in j0.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert!(close(*v, if i == k { ONE } else { ZERO }));
            }
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let jm = entangler_matrix(Entangler::MAX).unwrap();
        let expected = [[1, 0, 0, 2], [0, 1, 2, 0], [0, 2, 1, 0], [2, 0, 0, 1]];
        for i in 0..4 {
            for k in 0..4 {
                let want = match expected[i][k] {
                    0 => ZERO,
                    1 => Complex64::new(h, 0.0),
                    _ => Complex64::new(0.0, h),
                };
                assert!(close(jm[i][k], want));
            }
        }
        let psi1 = entangled_start(Entangler::new(PI / 3.0).unwrap()).unwrap();
        let want = [
            Complex64::new((PI / 6.0).cos(), 0.0),
            ZERO,
            ZERO,
            Complex64::new(0.0, (PI / 6.0).sin()),
        ];
        for k in 0..4 {
            assert!(close(psi1.amplitudes[k], want[k]));
        }
    }

    #[test]
    fn final_state_examples() {
        let s = final_state(Entangler::MAX, LocalOp::I, LocalOp::I).unwrap();
        assert!(close(s.amplitude(Basis::CC), ONE));
        let s = final_state(Entangler::MAX, LocalOp::C, LocalOp::C).unwrap();
        assert!(close(s.amplitude(Basis::CC), -ONE));
        let s = final_state(Entangler::MAX, LocalOp::I, LocalOp::D).unwrap();
        assert!(close(s.amplitude(Basis::CD), I));
        let d = collapse_distribution(&s).unwrap();
        assert!((d.probability(Basis::CD) - 1.0).abs() <= TOL);
    }

    #[test]
    fn collapse_distribution_examples() {
        let d = collapse_distribution(&QuantumState::CC).unwrap();
        assert_eq!(d.probabilities, [1.0, 0.0, 0.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = QuantumState {
            amplitudes: [Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(0.0, h)],
        };
        let d = collapse_distribution(&bell).unwrap();
        assert!((d.probabilities[0] - 0.5).abs() <= TOL && (d.probabilities[3] - 0.5).abs() <= TOL);
        let unnormalized = QuantumState {
            amplitudes: [ONE, ONE, ZERO, ZERO],
        };
        assert!(collapse_distribution(&unnormalized).is_err());
    }

    #[test]
    fn degenerate_distributions_sample_deterministically() {
        let cc = CollapseDistribution::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let dd = CollapseDistribution::new([0.0, 0.0, 0.0, 1.0]).unwrap();
        for seed in [0, 1, 7, u64::MAX] {
            assert_eq!(sample_collapse(&cc, seed), Basis::CC);
            assert_eq!(sample_collapse(&dd, seed), Basis::DD);
        }
    }

    #[test]
    fn sampling_is_reproducible_and_unbiased() {
        let d = CollapseDistribution::new([0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(sample_collapse(&d, 42), sample_collapse(&d, 42));
        let mut sampler = CollapseSampler::new(2024);
        let n = 100_000;
        let cc = (0..n).filter(|_| sampler.sample(&d) == Basis::CC).count();
        let freq = cc as f64 / n as f64;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn basis_coins() {
        assert_eq!(Basis::CD.coin(Agent::One), Coin::C);
        assert_eq!(Basis::CD.coin(Agent::Two), Coin::D);
        assert_eq!(Basis::from_coins(Coin::D, Coin::C), Basis::DC);
    }
}
