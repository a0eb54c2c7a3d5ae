//! States under imperfect cloning: the single-qubit cat state, its N-qubit
//! cloned image, white and colored noise, and the noisy clone density
//! matrices, plus the distance utilities that exhibit `rho_N != rho_sc^(⊗N)`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default cap on party count for dense materialization (4^10 entries).
pub const ORACLE_CAP: usize = 10;

const NORM_TOL: f64 = 1e-12;
const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_FLOOR: f64 = -1e-10;

/// Parameters of the input superposition `cos(xi/2)|0> + e^{i phi} sin(xi/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatParams {
    xi: f64,
    phi: f64,
}

impl CatParams {
    pub fn new(xi: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&xi) {
            return Err(Error::OutOfRange {
                name: "xi",
                value: xi,
                range: "[0, pi]",
            });
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(Self { xi, phi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Pure state of `n` qubits. Qubit 1 is the most significant bit of the
/// basis index, so `|i1 i2 .. in>` lives at `i1*2^(n-1) + .. + in`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(n: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::PartyCount {
                n,
                reason: "state needs at least one qubit",
            });
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: 1 << n,
            });
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant {
                check: "unit norm",
                residue: (norm2 - 1.0).abs(),
            });
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Amplitude of the basis state labelled by `bits`, qubit 1 first.
    pub fn amplitude(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: bits.len(),
            });
        }
        Ok(self.amplitudes[basis_index(bits)])
    }

    /// Projector `|psi><psi|` as a density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let dim = self.amplitudes.len();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix::new_unchecked(self.n, m)
    }
}

/// Basis index of `|i1 i2 .. in>` with qubit 1 as the most significant bit.
pub fn basis_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize))
}

/// Inverse of [`basis_index`]: decode an index back into `n` bits.
pub fn basis_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((index >> (n - 1 - q)) & 1) as u8).collect()
}

/// Mixed state of `n` qubits; construction enforces Hermiticity, unit trace
/// and positive semidefiniteness.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(n: usize, entries: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: dim,
            });
        }
        let herm_residue = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| (entries[(r, c)] - entries[(c, r)].conj()).norm())
            .fold(0.0f64, f64::max);
        if herm_residue > HERM_TOL {
            return Err(Error::Invariant {
                check: "Hermiticity",
                residue: herm_residue,
            });
        }
        let trace: C64 = entries.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::Invariant {
                check: "unit trace",
                residue: (trace - C64::new(1.0, 0.0)).norm(),
            });
        }
        let dm = Self { n, entries };
        let min_eig = dm.min_eigenvalue();
        if min_eig < PSD_FLOOR {
            return Err(Error::Invariant {
                check: "positive semidefiniteness",
                residue: min_eig,
            });
        }
        Ok(dm)
    }

    /// Internal constructor for matrices that are valid by construction.
    fn new_unchecked(n: usize, entries: DMatrix<C64>) -> Self {
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Smallest eigenvalue of the (Hermitian) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.entries)
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }

    /// `Tr(rho^2)`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries)
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum()
    }
}

/// The noisy clone family: `n = 1` is the white-noise input
/// `V |psi_sc><psi_sc| + (1-V)/2 I`; `n >= 2` is the cloned output
/// `V |psi_n><psi_n| + (1-V) * colored_noise(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyCloneSpec {
    n: usize,
    cat: CatParams,
    visibility: f64,
}

impl NoisyCloneSpec {
    pub fn new(n: usize, cat: CatParams, visibility: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::PartyCount {
                n,
                reason: "need at least one party",
            });
        }
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::OutOfRange {
                name: "visibility",
                value: visibility,
                range: "[0, 1]",
            });
        }
        Ok(Self { n, cat, visibility })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cat(&self) -> CatParams {
        self.cat
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }
}

/// `cos(xi/2)|0> + e^{i phi} sin(xi/2)|1>`.
pub fn make_cat_state(p: &CatParams) -> StateVector {
    let half = p.xi / 2.0;
    let amps = DVector::from_vec(vec![
        C64::new(half.cos(), 0.0),
        C64::from_polar(half.sin(), p.phi),
    ]);
    StateVector { n: 1, amplitudes: amps }
}

/// Image of the cat state under the basis-copying map:
/// `cos(xi/2)|0..0> + e^{i phi} sin(xi/2)|1..1>`.
pub fn apply_clone_map(n: usize, p: &CatParams) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::PartyCount {
            n,
            reason: "cloning map needs at least two qubits",
        });
    }
    let dim = 1usize << n;
    let half = p.xi / 2.0;
    let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
    amps[0] = C64::new(half.cos(), 0.0);
    amps[dim - 1] = C64::from_polar(half.sin(), p.phi);
    Ok(StateVector { n, amplitudes: amps })
}

/// Colored noise `(|0..0><0..0| + |1..1><1..1|) / 2`.
pub fn colored_noise_density(n: usize) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::PartyCount {
            n,
            reason: "colored noise defined for two or more qubits",
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(dim - 1, dim - 1)] = C64::new(0.5, 0.0);
    Ok(DensityMatrix::new_unchecked(n, m))
}

/// Dense density matrix of a noisy clone spec, default party cap.
pub fn materialize_density(s: &NoisyCloneSpec) -> Result<DensityMatrix> {
    materialize_density_capped(s, ORACLE_CAP)
}

/// Dense density matrix with an explicit party cap.
pub fn materialize_density_capped(s: &NoisyCloneSpec, cap: usize) -> Result<DensityMatrix> {
    if s.n > cap {
        return Err(Error::Capacity { n: s.n, cap });
    }
    let v = s.visibility;
    let (signal, noise) = if s.n == 1 {
        let dim = 2;
        let white = DMatrix::from_diagonal_element(dim, dim, C64::new(0.5, 0.0));
        (make_cat_state(&s.cat).projector(), white)
    } else {
        (
            apply_clone_map(s.n, &s.cat)?.projector(),
            colored_noise_density(s.n)?.entries,
        )
    };
    let entries = signal.entries * C64::new(v, 0.0) + noise * C64::new(1.0 - v, 0.0);
    DensityMatrix::new(s.n, entries)
}

/// Bloch vector `r` of a one-qubit state `rho = (I + r.sigma)/2`.
pub fn bloch_vector(d: &DensityMatrix) -> Result<[f64; 3]> {
    if d.n != 1 {
        return Err(Error::PartyCount {
            n: d.n,
            reason: "Bloch vector defined for a single qubit",
        });
    }
    let m = &d.entries;
    let rx = (m[(0, 1)] + m[(1, 0)]).re;
    let ry = (m[(1, 0)] - m[(0, 1)]).im;
    let rz = (m[(0, 0)] - m[(1, 1)]).re;
    Ok([rx, ry, rz])
}

/// `k`-fold Kronecker power, subject to the party cap.
pub fn tensor_power(d: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    if k < 1 {
        return Err(Error::PartyCount {
            n: k,
            reason: "tensor power needs k >= 1",
        });
    }
    let total = d.n * k;
    if total > ORACLE_CAP {
        return Err(Error::Capacity {
            n: total,
            cap: ORACLE_CAP,
        });
    }
    let mut m = d.entries.clone();
    for _ in 1..k {
        m = m.kronecker(&d.entries);
    }
    Ok(DensityMatrix::new_unchecked(total, m))
}

/// Trace distance `||a - b||_1 / 2`, in `[0, 1]` for density matrices.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    // a - b is Hermitian, so its singular values are |eigenvalues|.
    let diff = &a.entries - &b.entries;
    let eigs = hermitian_eigenvalues(&diff);
    Ok(eigs.iter().map(|e| e.abs()).sum::<f64>() / 2.0)
}

/// Eigenvalues of a Hermitian complex matrix by cyclic complex Jacobi
/// rotations. Unconditionally convergent, unlike the library QR-iteration
/// eigensolver, which diverges on some rank-deficient inputs.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gn = g.norm();
                if gn <= 1e-18 * scale {
                    continue;
                }
                let phase = g / C64::new(gn, 0.0);
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                // rotation angle zeroing the (p, q) entry
                let tau = (beta - alpha) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * C64::new(t * c, 0.0);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * C64::new(c, 0.0) - akq * s.conj();
                    a[(k, q)] = akp * s + akq * C64::new(c, 0.0);
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * C64::new(c, 0.0) - aqk * s;
                    a[(q, k)] = apk * s.conj() + aqk * C64::new(c, 0.0);
                }
            }
        }
    }
    a.diagonal().iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cat(xi: f64, phi: f64) -> CatParams {
        CatParams::new(xi, phi).unwrap()
    }

    #[test]
    fn cat_state_endpoints() {
        let zero = make_cat_state(&cat(0.0, 0.0));
        assert_eq!(zero.amplitudes()[0], C64::new(1.0, 0.0));
        assert_eq!(zero.amplitudes()[1], C64::new(0.0, 0.0));

        let one = make_cat_state(&cat(PI, 0.0));
        assert!(one.amplitudes()[0].norm() < 1e-15);
        assert!((one.amplitudes()[1] - C64::new(1.0, 0.0)).norm() < 1e-15);

        let plus = make_cat_state(&cat(PI / 2.0, 0.0));
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.amplitudes()[0].re - inv_sqrt2).abs() < 1e-15);
        assert!((plus.amplitudes()[1].re - inv_sqrt2).abs() < 1e-15);
    }

    #[test]
    fn cat_params_rejects_out_of_range() {
        assert!(CatParams::new(-0.1, 0.0).is_err());
        assert!(CatParams::new(PI + 0.1, 0.0).is_err());
        assert!(CatParams::new(1.0, TAU).is_err());
        assert!(CatParams::new(1.0, -0.5).is_err());
    }

    #[test]
    fn clone_map_matches_cat_amplitudes() {
        let s = apply_clone_map(2, &cat(PI / 2.0, 0.0)).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - inv_sqrt2).abs() < 1e-15);
        assert_eq!(s.amplitudes()[1], C64::new(0.0, 0.0));
        assert_eq!(s.amplitudes()[2], C64::new(0.0, 0.0));
        assert!((s.amplitudes()[3].re - inv_sqrt2).abs() < 1e-15);

        // |0> is a fixed point of the map
        let fixed = apply_clone_map(3, &cat(0.0, 0.0)).unwrap();
        assert_eq!(fixed.amplitude(&[0, 0, 0]).unwrap(), C64::new(1.0, 0.0));

        // phase rides on the |1..1> amplitude
        let s = apply_clone_map(2, &cat(PI / 3.0, PI / 2.0)).unwrap();
        let a11 = s.amplitude(&[1, 1]).unwrap();
        assert!((a11 - C64::new(0.0, 0.5)).norm() < 1e-15);

        assert!(apply_clone_map(1, &cat(0.0, 0.0)).is_err());
    }

    #[test]
    fn colored_noise_is_corner_diagonal() {
        let d2 = colored_noise_density(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert_eq!(d2.entries()[(i, j)], C64::new(expect, 0.0));
            }
        }
        let d3 = colored_noise_density(3).unwrap();
        assert_eq!(d3.entries()[(0, 0)].re, 0.5);
        assert_eq!(d3.entries()[(7, 7)].re, 0.5);
        let trace: C64 = d3.entries().diagonal().iter().sum();
        assert!((trace.re - 1.0).abs() < 1e-15);

        assert!(colored_noise_density(1).is_err());
    }

    #[test]
    fn materialize_limits() {
        // V = 0 is pure colored noise
        let spec = NoisyCloneSpec::new(2, cat(1.1, 0.3), 0.0).unwrap();
        let rho = materialize_density(&spec).unwrap();
        assert!((rho.entries()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho.entries()[(3, 3)].re - 0.5).abs() < 1e-15);
        assert!(rho.entries()[(0, 3)].norm() < 1e-15);

        // V = 1 is a pure projector
        let spec = NoisyCloneSpec::new(2, cat(PI / 2.0, 0.0), 1.0).unwrap();
        let rho = materialize_density(&spec).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        let sq = rho.entries() * rho.entries();
        let residue = (sq - rho.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(residue < 1e-10);

        // capacity error above the cap
        let spec = NoisyCloneSpec::new(11, cat(0.5, 0.0), 0.5).unwrap();
        assert!(matches!(
            materialize_density(&spec),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn bloch_vector_of_noisy_cat() {
        let spec = NoisyCloneSpec::new(1, cat(PI / 2.0, 0.0), 0.5).unwrap();
        let r = bloch_vector(&materialize_density(&spec).unwrap()).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-14);
        assert!(r[1].abs() < 1e-14);
        assert!(r[2].abs() < 1e-14);

        let mixed = NoisyCloneSpec::new(1, cat(0.7, 1.2), 0.0).unwrap();
        let r = bloch_vector(&materialize_density(&mixed).unwrap()).unwrap();
        assert!(r.iter().all(|c| c.abs() < 1e-14));

        let pure0 = NoisyCloneSpec::new(1, cat(0.0, 0.0), 1.0).unwrap();
        let r = bloch_vector(&materialize_density(&pure0).unwrap()).unwrap();
        assert!((r[2] - 1.0).abs() < 1e-14);

        let two = materialize_density(&NoisyCloneSpec::new(2, cat(0.5, 0.0), 0.5).unwrap()).unwrap();
        assert!(bloch_vector(&two).is_err());
    }

    #[test]
    fn bloch_norm_equals_visibility_on_grid() {
        for &xi in &[0.0, 0.4, PI / 2.0, 2.6, PI] {
            for &phi in &[0.0, 1.0, 3.9] {
                for &v in &[0.0, 0.25, 0.8, 1.0] {
                    let spec = NoisyCloneSpec::new(1, cat(xi, phi), v).unwrap();
                    let r = bloch_vector(&materialize_density(&spec).unwrap()).unwrap();
                    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                    assert!(
                        (norm - v).abs() < 1e-12,
                        "xi={xi} phi={phi} v={v}: |r|={norm}"
                    );
                }
            }
        }
    }

    #[test]
    fn tensor_power_basics() {
        let spec = NoisyCloneSpec::new(1, cat(0.0, 0.0), 0.0).unwrap();
        let half = materialize_density(&spec).unwrap();
        let quarter = tensor_power(&half, 2).unwrap();
        for i in 0..4 {
            assert!((quarter.entries()[(i, i)].re - 0.25).abs() < 1e-15);
        }

        let zero = materialize_density(&NoisyCloneSpec::new(1, cat(0.0, 0.0), 1.0).unwrap()).unwrap();
        let zzz = tensor_power(&zero, 3).unwrap();
        assert!((zzz.entries()[(0, 0)].re - 1.0).abs() < 1e-14);

        // x-basis projector pattern: all 4 entries 1/4
        let plus = materialize_density(&NoisyCloneSpec::new(1, cat(PI / 2.0, 0.0), 1.0).unwrap()).unwrap();
        let pp = tensor_power(&plus, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((pp.entries()[(i, j)].re - 0.25).abs() < 1e-14);
            }
        }

        assert!(tensor_power(&zero, 11).is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let a = materialize_density(&NoisyCloneSpec::new(2, cat(0.9, 0.2), 0.7).unwrap()).unwrap();
        assert!(trace_distance(&a, &a).unwrap() < 1e-14);

        let zero = materialize_density(&NoisyCloneSpec::new(1, cat(0.0, 0.0), 1.0).unwrap()).unwrap();
        let one = materialize_density(&NoisyCloneSpec::new(1, cat(PI, 0.0), 1.0).unwrap()).unwrap();
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);

        assert!(trace_distance(&a, &zero).is_err());
    }

    #[test]
    fn cloned_state_differs_from_product_state() {
        // For pure inputs the overlap is 1/sqrt(2), so the distance is
        // sqrt(1 - 1/2) = 1/sqrt(2).
        let spec1 = NoisyCloneSpec::new(1, cat(PI / 2.0, 0.0), 1.0).unwrap();
        let spec2 = NoisyCloneSpec::new(2, cat(PI / 2.0, 0.0), 1.0).unwrap();
        let product = tensor_power(&materialize_density(&spec1).unwrap(), 2).unwrap();
        let cloned = materialize_density(&spec2).unwrap();
        let d = trace_distance(&cloned, &product).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(d > 0.49);
    }

    proptest! {
        #[test]
        fn basis_index_round_trips(bits in proptest::collection::vec(0u8..2, 1..10)) {
            let idx = basis_index(&bits);
            prop_assert_eq!(basis_bits(idx, bits.len()), bits);
        }

        #[test]
        fn materialized_states_satisfy_invariants(
            n in 1usize..5,
            xi in 0.0..PI,
            phi in 0.0..TAU,
            v in 0.0..=1.0f64,
        ) {
            let spec = NoisyCloneSpec::new(n, cat(xi, phi), v).unwrap();
            // construction itself runs the Hermiticity/trace/PSD checks
            let rho = materialize_density(&spec).unwrap();
            prop_assert!(rho.min_eigenvalue() >= -1e-10);
        }
    }
}
