//! Certification layer: the theorem setting families, closed-form inequality
//! values and violation thresholds, the CHSH violation surface, and
//! derivative-free angle optimization producing violation reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::bell::{chsh_spec, even_spec, odd_spec, quantum_value, InequalitySpec};
use crate::correlators::{Direction, PartyChoice, PartySettings, SettingTable};
use crate::error::{Error, Result};
use crate::qstate::{CatParams, NoisyCloneSpec};

/// A quantum value must beat the classical bound by this margin to count
/// as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Golden-section interval tolerance for witness-angle searches.
pub const SEARCH_TOL: f64 = 1e-10;

/// Which inequality family a certification used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityKind {
    Chsh,
    EvenN,
    OddN,
}

impl InequalityKind {
    pub fn for_parties(n: usize) -> Self {
        if n == 2 {
            Self::Chsh
        } else if n % 2 == 0 {
            Self::EvenN
        } else {
            Self::OddN
        }
    }

    pub fn spec(self, n: usize) -> Result<InequalitySpec> {
        match self {
            Self::Chsh => Ok(chsh_spec()),
            Self::EvenN => even_spec(n),
            Self::OddN => odd_spec(n),
        }
    }

    /// The closed-form family setting table at witness angle `theta11`.
    pub fn settings(self, n: usize, theta11: f64) -> Result<SettingTable> {
        match self {
            Self::Chsh => chsh_settings(theta11, 0.0),
            Self::EvenN => theorem1_settings(n, theta11),
            Self::OddN => theorem2_settings(n, theta11),
        }
    }
}

/// Outcome of one certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub n: usize,
    pub visibility: f64,
    pub xi: f64,
    pub inequality_kind: InequalityKind,
    pub value: f64,
    pub classical_bound: f64,
    pub witness_theta11: f64,
    pub witness: SettingTable,
    pub violated: bool,
}

/// CHSH setting family: `theta_A1 = 0`, `theta_A2 = pi/2`,
/// `theta_B2 = -theta_B1`, azimuths zero except `phi_A2 = phi_cat`.
pub fn chsh_settings(theta_b1: f64, phi_cat: f64) -> Result<SettingTable> {
    SettingTable::new(vec![
        PartySettings::measured(
            1,
            vec![
                Direction::new(0.0, 0.0)?,
                Direction::normalized(PI / 2.0, phi_cat),
            ],
        ),
        PartySettings::measured(
            1,
            vec![
                Direction::normalized(theta_b1, 0.0),
                Direction::normalized(-theta_b1, 0.0),
            ],
        ),
    ])
}

/// Even-N setting family: party 1 measures `(theta11, theta12)`, every other
/// party the complements `(pi - theta11, pi - theta12)`; azimuths zero.
pub fn theorem1_settings(n: usize, theta11: f64) -> Result<SettingTable> {
    theorem1_settings_with(n, theta11, PI)
}

pub fn theorem1_settings_with(n: usize, theta11: f64, theta12: f64) -> Result<SettingTable> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::PartyCount {
            n,
            reason: "even-N settings need an even n >= 2",
        });
    }
    let mut parties = vec![PartySettings::measured(
        1,
        vec![
            Direction::normalized(theta11, 0.0),
            Direction::normalized(theta12, 0.0),
        ],
    )];
    for _ in 1..n {
        parties.push(PartySettings::measured(
            1,
            vec![
                Direction::normalized(PI - theta11, 0.0),
                Direction::normalized(PI - theta12, 0.0),
            ],
        ));
    }
    SettingTable::new(parties)
}

/// Odd-N setting family: party 1 measures `(theta11, 0)`, parties
/// `2..n-1` measure `(pi/2, pi)`, party n has the idle label 0 and a
/// `pi/2` measurement at label 1; azimuths zero.
pub fn theorem2_settings(n: usize, theta11: f64) -> Result<SettingTable> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::PartyCount {
            n,
            reason: "odd-N settings need an odd n >= 3",
        });
    }
    let mut parties = vec![PartySettings::measured(
        1,
        vec![Direction::normalized(theta11, 0.0), Direction::new(0.0, 0.0)?],
    )];
    for _ in 1..n - 1 {
        parties.push(PartySettings::measured(
            1,
            vec![Direction::new(PI / 2.0, 0.0)?, Direction::new(PI, 0.0)?],
        ));
    }
    parties.push(PartySettings {
        first_label: 0,
        choices: vec![
            PartyChoice::NoMeasurement,
            PartyChoice::Measure(Direction::new(PI / 2.0, 0.0)?),
        ],
    });
    SettingTable::new(parties)
}

/// Even-N closed-form value
/// `1 + [V sin(xi) sin^n(theta11) - (1 - cos(theta11))^n] / 2^(n-1)`.
///
/// This is the pre-factored expression; it is finite everywhere, including
/// the `theta11 = pi` and `V sin(xi) = 0` points where the textbook
/// `tan^n(theta/2)` form degenerates.
pub fn theorem1_value(n: usize, v: f64, xi: f64, theta11: f64) -> f64 {
    let vs = v * xi.sin();
    let scale = (1u64 << (n - 1)) as f64;
    1.0 + (vs * theta11.sin().powi(n as i32) - (1.0 - theta11.cos()).powi(n as i32)) / scale
}

/// Upper edge of the even-N violation interval: `2 atan((V sin xi)^(1/n))`;
/// 0 when `V sin(xi) = 0`.
pub fn theorem1_threshold(n: usize, v: f64, xi: f64) -> f64 {
    let vs = v * xi.sin();
    if vs <= 0.0 {
        0.0
    } else {
        2.0 * vs.powf(1.0 / n as f64).atan()
    }
}

/// Odd-N closed-form value
/// `1 + [V sin(xi) sin(theta11) - cos(theta11) - 1] / 2^(n-1)`.
pub fn theorem2_value(n: usize, v: f64, xi: f64, theta11: f64) -> f64 {
    let vs = v * xi.sin();
    let scale = (1u64 << (n - 1)) as f64;
    let direct = 1.0 + (vs * theta11.sin() - theta11.cos() - 1.0) / scale;
    // phase-amplitude rewrite of the same expression
    let delta = -(1.0 / vs).atan();
    let rewritten = 1.0 + ((1.0 + vs * vs).sqrt() * (theta11 + delta).sin() - 1.0) / scale;
    debug_assert!(
        (direct - rewritten).abs() < 1e-12,
        "closed-form disagreement: {direct} vs {rewritten}"
    );
    direct
}

/// Lower edge of the odd-N violation interval: `2 atan(1 / (V sin xi))`;
/// pi (empty interval) when `V sin(xi) = 0`.
pub fn theorem2_threshold(_n: usize, v: f64, xi: f64) -> f64 {
    let vs = v * xi.sin();
    2.0 * (1.0 / vs).atan()
}

/// Reduced CHSH value `cos(theta_B1) + V sin(xi) sin(theta_B1)`.
pub fn chsh_value(v: f64, xi: f64, theta_b1: f64) -> f64 {
    theta_b1.cos() + v * xi.sin() * theta_b1.sin()
}

/// Maximum of [`chsh_value`] over the witness angle:
/// `sqrt(1 + (V sin xi)^2)`, attained at `theta* = atan(V sin xi)`.
pub fn chsh_max(v: f64, xi: f64) -> f64 {
    let vs = v * xi.sin();
    (1.0 + vs * vs).sqrt()
}

/// One point of the CHSH violation surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Point {
    pub xi: f64,
    pub visibility: f64,
    pub chsh_value: f64,
}

/// Maximal CHSH value on a `(xi, V)` grid spanning `[0, pi] x [0, 1]`,
/// row-major with `xi` as the outer index.
pub fn fig1_surface(res_xi: usize, res_v: usize) -> Result<Vec<Fig1Point>> {
    if res_xi < 2 || res_v < 2 {
        return Err(Error::OutOfRange {
            name: "grid resolution",
            value: res_xi.min(res_v) as f64,
            range: "[2, ..)",
        });
    }
    let points: Vec<Fig1Point> = (0..res_xi * res_v)
        .into_par_iter()
        .map(|k| {
            let i = k / res_v;
            let j = k % res_v;
            let xi = PI * i as f64 / (res_xi - 1) as f64;
            let v = j as f64 / (res_v - 1) as f64;
            Fig1Point {
                xi,
                visibility: v,
                chsh_value: chsh_max(v, xi),
            }
        })
        .collect();
    Ok(points)
}

/// Golden-section maximization after a coarse bracketing scan, so the
/// search tolerates objectives that are not globally unimodal.
pub(crate) fn scan_then_golden<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    scan_points: usize,
    tol: f64,
) -> (f64, f64) {
    debug_assert!(b > a && scan_points >= 3);
    let step = (b - a) / (scan_points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..scan_points {
        let v = f(a + step * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    golden_section_max(&f, lo, hi, tol)
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Certify the impossibility of perfect 1->n cloning at `(V, xi)`.
///
/// Picks the inequality family by parity, maximizes the closed-form value
/// over the witness angle, and reports a violation whenever the value beats
/// the classical bound by [`VIOLATION_MARGIN`]. The degenerate points
/// (`V = 0` or `xi` in `{0, pi}`) yield a well-formed non-violation report.
pub fn certify_no_cloning(n: usize, v: f64, xi: f64) -> Result<ViolationReport> {
    if n < 2 {
        return Err(Error::PartyCount {
            n,
            reason: "certification needs at least two parties",
        });
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            name: "visibility",
            value: v,
            range: "[0, 1]",
        });
    }
    if !(0.0..=PI).contains(&xi) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "[0, pi]",
        });
    }
    let kind = InequalityKind::for_parties(n);
    let (theta, value) = match kind {
        InequalityKind::Chsh => {
            scan_then_golden(|t| chsh_value(v, xi, t), 0.0, PI / 2.0, 65, SEARCH_TOL)
        }
        InequalityKind::EvenN => {
            scan_then_golden(|t| theorem1_value(n, v, xi, t), 0.0, PI, 129, SEARCH_TOL)
        }
        InequalityKind::OddN => {
            scan_then_golden(|t| theorem2_value(n, v, xi, t), 0.0, PI, 129, SEARCH_TOL)
        }
    };
    let witness = kind.settings(n, theta)?;
    Ok(ViolationReport {
        n,
        visibility: v,
        xi,
        inequality_kind: kind,
        value,
        classical_bound: 1.0,
        witness_theta11: theta,
        witness,
        violated: value > 1.0 + VIOLATION_MARGIN,
    })
}

/// Adapt a family setting table to a nonzero cat phase by pointing every
/// measured azimuth of party 1 at `phi_cat`. All coherence-carrying label
/// tuples of the three families pick up their azimuth sum from party 1
/// alone, so the compensated table reproduces the `phi_cat = 0` value.
pub fn phase_compensated(table: &SettingTable, phi_cat: f64) -> SettingTable {
    let mut parties = table.parties().to_vec();
    parties[0].choices = parties[0]
        .choices
        .iter()
        .map(|c| match c {
            PartyChoice::Measure(d) => {
                PartyChoice::Measure(Direction::normalized(d.theta(), phi_cat))
            }
            PartyChoice::NoMeasurement => PartyChoice::NoMeasurement,
        })
        .collect();
    SettingTable::new(parties).expect("shape unchanged")
}

/// Knobs for [`optimize_violation`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    /// Random restarts for the full-angle stage (restart 0 always starts
    /// from the closed-form family optimum).
    pub restarts: usize,
    /// Maximum coordinate-descent sweeps per restart.
    pub sweeps: usize,
    /// RNG seed for restart initialization.
    pub seed: u64,
    /// When false, stop after the 1-D closed-form family stage.
    pub full_search: bool,
    /// Cat-state relative phase of the optimized state.
    pub phi_cat: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            sweeps: 200,
            seed: 42,
            full_search: true,
            phi_cat: 0.0,
        }
    }
}

/// Best violation found for one inequality family and state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedViolation {
    pub table: SettingTable,
    pub value: f64,
    pub sweeps_used: usize,
}

// A setting table flattened to its free angles: (party, label-position,
// is-azimuth) coordinates in a fixed order.
fn table_to_params(table: &SettingTable) -> Vec<f64> {
    let mut params = Vec::new();
    for p in table.parties() {
        for c in &p.choices {
            if let PartyChoice::Measure(d) = c {
                params.push(d.theta());
                params.push(d.phi());
            }
        }
    }
    params
}

fn params_to_table(template: &SettingTable, params: &[f64]) -> SettingTable {
    let mut k = 0;
    let parties = template
        .parties()
        .iter()
        .map(|p| PartySettings {
            first_label: p.first_label,
            choices: p
                .choices
                .iter()
                .map(|c| match c {
                    PartyChoice::NoMeasurement => PartyChoice::NoMeasurement,
                    PartyChoice::Measure(_) => {
                        let d = Direction::normalized(params[k], params[k + 1]);
                        k += 2;
                        PartyChoice::Measure(d)
                    }
                })
                .collect(),
        })
        .collect();
    SettingTable::new(parties).expect("template shape is valid")
}

/// Maximize the quantum value of the family's inequality over measurement
/// angles: first the family's single free angle, then (optionally)
/// coordinate descent over every polar and azimuthal angle with seeded
/// random restarts. The returned value never falls below the closed-form family
/// optimum.
pub fn optimize_violation(
    kind: InequalityKind,
    n: usize,
    v: f64,
    xi: f64,
    opts: &OptimizeOptions,
) -> Result<OptimizedViolation> {
    let spec = kind.spec(n)?;
    let state = NoisyCloneSpec::new(n, CatParams::new(xi, opts.phi_cat)?, v)?;

    // stage 1: the family's one-dimensional witness angle
    let report = certify_no_cloning(n, v, xi)?;
    let family_table = phase_compensated(&report.witness, opts.phi_cat);
    let family_value = quantum_value(&spec, &state, &family_table, false)?;

    if !opts.full_search {
        return Ok(OptimizedViolation {
            table: family_table,
            value: family_value,
            sweeps_used: 0,
        });
    }

    // stage 2: coordinate descent over all angles, restart 0 seeded at the
    // family optimum, the rest at random angle vectors
    let dim = table_to_params(&family_table).len();
    let objective = |params: &[f64]| -> f64 {
        let table = params_to_table(&family_table, params);
        quantum_value(&spec, &state, &table, false).expect("labels come from the spec")
    };

    let results: Vec<(f64, usize, Vec<f64>, usize)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|restart| {
            let mut params = if restart == 0 {
                table_to_params(&family_table)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
                (0..dim)
                    .map(|i| {
                        if i % 2 == 0 {
                            rng.gen_range(0.0..PI)
                        } else {
                            rng.gen_range(0.0..TAU)
                        }
                    })
                    .collect()
            };
            let mut best = objective(&params);
            let mut sweeps_used = 0;
            for sweep in 0..opts.sweeps {
                let before = best;
                for i in 0..dim {
                    let range_hi = if i % 2 == 0 { PI } else { TAU };
                    let f1 = |x: f64| {
                        let mut p = params.clone();
                        p[i] = x;
                        objective(&p)
                    };
                    let (x, fx) = scan_then_golden(f1, 0.0, range_hi, 17, SEARCH_TOL);
                    if fx > best {
                        best = fx;
                        params[i] = x;
                    }
                }
                sweeps_used = sweep + 1;
                if best - before < 1e-12 {
                    break;
                }
            }
            (best, restart, params, sweeps_used)
        })
        .collect();

    // best value wins; ties break toward the lowest restart index
    let (mut value, _, mut params, mut sweeps_used) =
        (family_value, 0usize, table_to_params(&family_table), 0usize);
    for (val, restart, p, s) in results {
        if val > value {
            value = val;
            params = p;
            sweeps_used = s;
        }
        let _ = restart;
    }
    Ok(OptimizedViolation {
        table: params_to_table(&family_table, &params),
        value,
        sweeps_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell;

    #[test]
    fn theorem1_settings_complement_rule() {
        let t = theorem1_settings(4, PI / 3.0).unwrap();
        if let PartyChoice::Measure(d) = t.choice(3, 1).unwrap() {
            assert!((d.theta() - 2.0 * PI / 3.0).abs() < 1e-15);
        } else {
            panic!("party 3 setting 1 should measure");
        }
        // default theta12 = pi makes party k >= 2 setting 2 point at 0
        if let PartyChoice::Measure(d) = t.choice(2, 2).unwrap() {
            assert!(d.theta().abs() < 1e-15);
        } else {
            panic!("party 2 setting 2 should measure");
        }
        let t2 = theorem1_settings(2, 0.0).unwrap();
        if let PartyChoice::Measure(d) = t2.choice(2, 1).unwrap() {
            assert!((d.theta() - PI).abs() < 1e-15);
        } else {
            panic!();
        }
        assert!(theorem1_settings(3, 0.5).is_err());
    }

    #[test]
    fn theorem2_settings_layout() {
        let t = theorem2_settings(3, 3.0 * PI / 4.0).unwrap();
        if let PartyChoice::Measure(d) = t.choice(2, 2).unwrap() {
            assert!((d.theta() - PI).abs() < 1e-15);
        } else {
            panic!();
        }
        assert!(matches!(t.choice(3, 0).unwrap(), PartyChoice::NoMeasurement));
        if let PartyChoice::Measure(d) = t.choice(1, 2).unwrap() {
            assert!(d.theta().abs() < 1e-15);
        } else {
            panic!();
        }
        assert!(theorem2_settings(4, 0.5).is_err());
    }

    #[test]
    fn theorem1_value_examples() {
        let v = theorem1_value(4, 1.0, PI / 2.0, PI / 3.0);
        assert!((v - 1.0625).abs() < 1e-12);

        // boundary angle gives exactly 1
        for &(vis, xi) in &[(1.0, PI / 2.0), (0.4, 1.0), (0.9, 2.5)] {
            let th = theorem1_threshold(4, vis, xi);
            assert!((theorem1_value(4, vis, xi, th) - 1.0).abs() < 1e-12);
        }

        let v2 = theorem1_value(2, 1.0, PI / 2.0, PI / 2.0);
        assert!((v2 - 1.0).abs() < 1e-12);

        // finite at the tan singularity theta = pi
        let at_pi = theorem1_value(4, 0.7, 1.0, PI);
        assert!(at_pi.is_finite());
        assert!((at_pi - (1.0 - 2.0)).abs() < 1e-12); // 1 + (0 - 2^4)/8
    }

    #[test]
    fn theorem1_factored_form_agrees() {
        // away from the singular points the factored display form matches
        for &(n, vis, xi, th) in &[
            (4usize, 1.0, PI / 2.0, 1.0f64),
            (6, 0.7, 1.2, 0.6),
            (2, 0.5, 2.0, 1.4),
        ] {
            let vs = vis * xi.sin();
            let scale = (1u64 << (n - 1)) as f64;
            let factored = 1.0
                + vs * th.sin().powi(n as i32) / scale
                    * (1.0 - (th / 2.0).tan().powi(n as i32) / vs);
            assert!((theorem1_value(n, vis, xi, th) - factored).abs() < 1e-12);
        }
    }

    #[test]
    fn theorem1_threshold_examples() {
        assert!((theorem1_threshold(4, 1.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
        assert_eq!(theorem1_threshold(4, 0.0, 1.0), 0.0);
        assert_eq!(theorem1_threshold(6, 0.5, 0.0), 0.0);
        assert!((theorem1_threshold(2, 1.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn theorem2_value_examples() {
        let v = theorem2_value(3, 1.0, PI / 2.0, 3.0 * PI / 4.0);
        assert!((v - (1.0 + (2.0f64.sqrt() - 1.0) / 4.0)).abs() < 1e-12);

        let at_zero = theorem2_value(3, 0.8, 1.1, 0.0);
        assert!((at_zero - 0.5).abs() < 1e-12);

        for &th in &[0.0, 1.0, 2.0, PI] {
            assert!(theorem2_value(5, 0.0, 1.0, th) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn theorem2_threshold_examples() {
        assert!((theorem2_threshold(3, 1.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
        assert!((theorem2_threshold(5, 0.0, 1.0) - PI).abs() < 1e-12);
        for &(vis, xi) in &[(1.0, PI / 2.0), (0.3, 0.9), (0.8, 2.8)] {
            let th = theorem2_threshold(3, vis, xi);
            assert!((theorem2_value(3, vis, xi, th) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_closed_forms() {
        assert!((chsh_max(1.0, PI / 2.0) - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(chsh_max(0.0, 1.3), 1.0);
        let (theta, value) =
            scan_then_golden(|t| chsh_value(1.0, PI / 2.0, t), 0.0, PI / 2.0, 65, SEARCH_TOL);
        // near the flat maximum the location is only f64-noise accurate
        assert!((theta - PI / 4.0).abs() < 1e-6);
        assert!((value - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fig1_surface_shape_and_boundaries() {
        let pts = fig1_surface(5, 5).unwrap();
        assert_eq!(pts.len(), 25);
        // row-major, xi outer
        assert!(pts[0].xi == 0.0 && pts[0].visibility == 0.0);
        assert!(pts[4].xi == 0.0 && pts[4].visibility == 1.0);
        for p in &pts {
            if p.visibility == 0.0 || p.xi == 0.0 || p.xi == PI {
                assert_eq!(p.chsh_value, 1.0);
            } else {
                assert!(p.chsh_value > 1.0);
            }
        }
        assert!(fig1_surface(1, 5).is_err());
    }

    #[test]
    fn certify_examples() {
        let r = certify_no_cloning(4, 0.5, PI / 2.0).unwrap();
        assert!(r.violated);
        let upper = theorem1_threshold(4, 0.5, PI / 2.0);
        assert!(r.witness_theta11 > 0.0 && r.witness_theta11 < upper);

        let r = certify_no_cloning(3, 0.0, PI / 2.0).unwrap();
        assert!(!r.violated);

        let r = certify_no_cloning(5, 1.0, PI / 4.0).unwrap();
        assert!(r.violated);

        assert!(certify_no_cloning(1, 0.5, 1.0).is_err());
        assert!(certify_no_cloning(2, 1.5, 1.0).is_err());
        assert!(certify_no_cloning(2, 0.5, -1.0).is_err());
    }

    #[test]
    fn certified_value_matches_assembled_inequality() {
        for &(n, vis, xi) in &[(2usize, 0.8, 1.0), (3, 0.6, 2.0), (4, 1.0, PI / 2.0), (5, 0.9, 0.7)] {
            let r = certify_no_cloning(n, vis, xi).unwrap();
            let spec = r.inequality_kind.spec(n).unwrap();
            let state = NoisyCloneSpec::new(n, CatParams::new(xi, 0.0).unwrap(), vis).unwrap();
            let assembled = bell::quantum_value(&spec, &state, &r.witness, false).unwrap();
            assert!(
                (assembled - r.value).abs() < 1e-10,
                "n={n}: assembled={assembled} reported={}",
                r.value
            );
            let oracle = bell::quantum_value(&spec, &state, &r.witness, true).unwrap();
            assert!((assembled - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_compensation_preserves_values() {
        let phi_cat = 1.9;
        for &(n, vis, xi) in &[(2usize, 0.8, 1.0), (3, 0.6, 2.0), (4, 1.0, PI / 2.0)] {
            let r = certify_no_cloning(n, vis, xi).unwrap();
            let spec = r.inequality_kind.spec(n).unwrap();
            let compensated = phase_compensated(&r.witness, phi_cat);
            let state =
                NoisyCloneSpec::new(n, CatParams::new(xi, phi_cat).unwrap(), vis).unwrap();
            let value = bell::quantum_value(&spec, &state, &compensated, false).unwrap();
            assert!((value - r.value).abs() < 1e-10, "n={n}");
            let oracle = bell::quantum_value(&spec, &state, &compensated, true).unwrap();
            assert!((value - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn optimizer_beats_family_value() {
        let opts = OptimizeOptions {
            restarts: 2,
            sweeps: 20,
            ..OptimizeOptions::default()
        };

        let chsh = optimize_violation(InequalityKind::Chsh, 2, 1.0, PI / 2.0, &opts).unwrap();
        assert!(chsh.value >= 2.0f64.sqrt() - 1e-6, "value {}", chsh.value);

        let even = optimize_violation(InequalityKind::EvenN, 4, 1.0, PI / 2.0, &opts).unwrap();
        assert!(even.value >= 1.0625 - 1e-9);

        let noise_only = optimize_violation(InequalityKind::OddN, 3, 0.0, 1.0, &opts).unwrap();
        assert!(noise_only.value <= 1.0 + 1e-9);
    }

    #[test]
    fn optimizer_family_stage_only() {
        let opts = OptimizeOptions {
            full_search: false,
            ..OptimizeOptions::default()
        };
        let r = optimize_violation(InequalityKind::OddN, 3, 1.0, PI / 2.0, &opts).unwrap();
        assert!((r.value - (1.0 + (2.0f64.sqrt() - 1.0) / 4.0)).abs() < 1e-9);
    }
}
