//! Lower bounds that every disagreement bound must satisfy, the
//! perturbation transform that moves a pointwise bound to nearby points,
//! the witness families behind each bound, and the curve emitter.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::dist::{DiscreteDistribution, Family, Universe};
use crate::error::{Error, Result};
use crate::exact::disagreement_bound;

/// Real inputs this close to an inverse integer are treated as exact.
/// The floor of 1/x is discontinuous there, so the boundary must not be
/// left to floating-point luck.
pub const SNAP_TOLERANCE: f64 = 1e-12;

/// Largest subset family the set-witness constructor will build.
pub const SET_FAMILY_CAP: u64 = 100_000;

/// An exact rational in (0, 1], kept reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    num: BigUint,
    den: BigUint,
}

impl RationalPoint {
    pub fn new(num: u64, den: u64) -> Result<RationalPoint> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::DomainError(format!(
                "{num}/{den} is not in (0, 1]"
            )));
        }
        let (num, den) = (BigUint::from(num), BigUint::from(den));
        let g = num.gcd(&den);
        Ok(RationalPoint { num: &num / &g, den: &den / &g })
    }

    pub fn value(&self) -> f64 {
        self.num.to_f64().unwrap() / self.den.to_f64().unwrap()
    }

    /// floor(1/x), exact.
    pub fn floor_inverse(&self) -> u64 {
        (&self.den / &self.num).to_u64().expect("den/num fits u64 for u64 inputs")
    }

    /// ceil(1/x), exact.
    pub fn ceil_inverse(&self) -> u64 {
        let (q, r) = self.den.div_rem(&self.num);
        let q = q.to_u64().expect("den/num fits u64 for u64 inputs");
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }
}

fn check_open_unit(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 || x >= 1.0 {
        return Err(Error::DomainError(format!("x = {x} outside (0, 1)")));
    }
    Ok(())
}

/// floor(1/x) with inverse integers snapped to themselves.
fn snapped_floor_inverse(x: f64) -> u64 {
    let inv = 1.0 / x;
    let near = inv.round();
    if near >= 1.0 && (x - 1.0 / near).abs() <= SNAP_TOLERANCE {
        near as u64
    } else {
        inv.floor() as u64
    }
}

/// ceil(1/x) with the same snapping.
fn snapped_ceil_inverse(x: f64) -> u64 {
    let inv = 1.0 / x;
    let near = inv.round();
    if near >= 1.0 && (x - 1.0 / near).abs() <= SNAP_TOLERANCE {
        near as u64
    } else {
        inv.ceil() as u64
    }
}

/// The bound at inverse integers: any disagreement bound has
/// f(1/n) >= 2/(n+1) = F(1/n).
pub fn lb_inverse_integer(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::DomainError("need n >= 1".into()));
    }
    Ok(2.0 / (n as f64 + 1.0))
}

/// The bound at arbitrary points: f(x) >= 2x / (1 + 1/floor(1/x)).
pub fn lb_all_x(x: f64) -> Result<f64> {
    check_open_unit(x)?;
    let n = snapped_floor_inverse(x) as f64;
    Ok(2.0 * x / (1.0 + 1.0 / n))
}

/// lb_all_x with the floor taken on an exact rational.
pub fn lb_all_x_rational(x: &RationalPoint) -> Result<f64> {
    if x.is_one() {
        return Err(Error::DomainError("x = 1 outside (0, 1)".into()));
    }
    let n = x.floor_inverse() as f64;
    Ok(2.0 * x.value() / (1.0 + 1.0 / n))
}

fn pointwise_from_segment(x: f64, n: u64) -> f64 {
    let n = n as f64;
    let rising = 2.0 * (n - 1.0) * x / n;
    let falling = 4.0 * n / (n * n - 1.0) - 2.0 * n * x / (n - 1.0);
    rising.max(falling)
}

/// The two-sided bound on the segment [1/n, 1/(n-1)]:
/// f(x) >= max(2(n-1)x/n, 4n/(n^2-1) - 2nx/(n-1)).
pub fn lb_pointwise(x: f64) -> Result<f64> {
    check_open_unit(x)?;
    Ok(pointwise_from_segment(x, snapped_ceil_inverse(x)))
}

/// lb_pointwise with the segment located exactly.
pub fn lb_pointwise_rational(x: &RationalPoint) -> Result<f64> {
    if x.is_one() {
        return Err(Error::DomainError("x = 1 outside (0, 1)".into()));
    }
    Ok(pointwise_from_segment(x.value(), x.ceil_inverse()))
}

/// Transforms a disagreement bound into another one:
/// x maps to f((1-eps)x + delta) + 2 eps. Valid for 0 <= delta <= eps <= 1.
pub fn perturb_bound<G>(f: G, epsilon: f64, delta: f64) -> Result<impl Fn(f64) -> f64>
where
    G: Fn(f64) -> f64,
{
    if !(0.0..=1.0).contains(&epsilon) || !(0.0..=epsilon).contains(&delta) {
        return Err(Error::DomainError(format!(
            "need 0 <= delta <= eps <= 1, got eps = {epsilon}, delta = {delta}"
        )));
    }
    Ok(move |x: f64| f((1.0 - epsilon) * x + delta) + 2.0 * epsilon)
}

/// Whether F(k/n) is known to be a valid pointwise lower bound at k/n.
#[derive(Clone, Copy, Debug)]
pub struct KnCondition {
    /// n >= ceil(a k^2 + 6k) with a = 1/ln(3/2).
    pub sharp: bool,
    pub sharp_threshold: u64,
    /// The coarser published sufficient condition n >= 3k^2 + 6k.
    pub coarse: bool,
    pub coarse_threshold: u64,
}

pub fn kn_condition(k: u64, n: u64) -> Result<KnCondition> {
    if k < 2 || n == 0 {
        return Err(Error::DomainError(format!(
            "need k >= 2 and n >= 1, got ({k}, {n})"
        )));
    }
    let a = 1.0 / 1.5f64.ln();
    let sharp_threshold = (a * (k * k) as f64 + 6.0 * k as f64).ceil() as u64;
    let coarse_threshold = 3 * k * k + 6 * k;
    Ok(KnCondition {
        sharp: n >= sharp_threshold,
        sharp_threshold,
        coarse: n >= coarse_threshold,
        coarse_threshold,
    })
}

fn atom_labels(n: u64) -> Vec<String> {
    (0..=n).map(|i| i.to_string()).collect()
}

/// n+1 members over {0..n}, member i uniform off its own index.
/// Every pair has total variation distance exactly 1/n.
pub fn witness_complement_family(n: u64) -> Result<Family> {
    if n == 0 {
        return Err(Error::DomainError("need n >= 1".into()));
    }
    let universe = Universe::new(atom_labels(n))?;
    let mut members = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let probs = (0..=n)
            .map(|u| if u == i { 0.0 } else { 1.0 / n as f64 })
            .collect();
        members.push((
            format!("X{i}"),
            DiscreteDistribution::from_probs(&universe, probs)?,
        ));
    }
    Family::new(universe, members)
}

/// The perturbed witness at level x: with n = floor(1/x) and
/// eps = (1 - nx)/(n+1), member i has mass eps at its own index and
/// x + eps elsewhere. Every pair has total variation distance exactly x;
/// at x = 1/n this is the complement family.
pub fn witness_perturbed_family(x: f64) -> Result<Family> {
    check_open_unit(x)?;
    let n = snapped_floor_inverse(x);
    let eps = (1.0 - n as f64 * x) / (n as f64 + 1.0);
    let universe = Universe::new(atom_labels(n))?;
    let mut members = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let probs = (0..=n)
            .map(|u| if u == i { eps } else { x + eps })
            .collect();
        members.push((
            format!("X{i}"),
            DiscreteDistribution::from_probs(&universe, probs)?,
        ));
    }
    Family::new(universe, members)
}

/// One member per size-n subset of {1..n+k}, uniform on the subset.
/// Pairs at Hamming distance m have total variation distance m/n.
pub fn witness_set_family(n: u64, k: u64) -> Result<Family> {
    use crate::combi::{binomial, SubsetSpace};
    if k > n {
        return Err(Error::DomainError(format!("need k <= n, got ({n}, {k})")));
    }
    if binomial(n + k, k) > BigUint::from(SET_FAMILY_CAP) {
        return Err(Error::TooLarge(format!(
            "subset family for ({n}, {k}) exceeds {SET_FAMILY_CAP} members"
        )));
    }
    let space = SubsetSpace::new(n, k)?;
    let universe = Universe::new((1..=n + k).map(|i| i.to_string()))?;
    let mut members = Vec::with_capacity(space.count());
    for i in 0..space.count() {
        let labels: Vec<String> = space.elements(i).iter().map(|e| e.to_string()).collect();
        let dist =
            DiscreteDistribution::uniform_on(&universe, labels.iter().map(|s| s.as_str()))?;
        members.push((space.label(i), dist));
    }
    Family::new(universe, members)
}

#[derive(Clone, Copy, Debug)]
pub struct BoundRow {
    pub x: f64,
    pub f_value: f64,
    pub lower: f64,
}

/// The lower envelope rows (x, F(x), max of the two bounds).
#[derive(Clone, Debug)]
pub struct BoundCurve {
    pub rows: Vec<BoundRow>,
}

pub fn emit_bounds_curve(grid: &[f64]) -> Result<BoundCurve> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DomainError("grid must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        check_open_unit(x)?;
        rows.push(BoundRow {
            x,
            f_value: disagreement_bound(x)?,
            lower: lb_all_x(x)?.max(lb_pointwise(x)?),
        });
    }
    Ok(BoundCurve { rows })
}

/// A rational point k/n where F(k/n) itself is a proven lower bound.
#[derive(Clone, Copy, Debug)]
pub struct KnPoint {
    pub k: u64,
    pub n: u64,
    pub x: f64,
    pub bound: f64,
}

/// All points k/n with 2 <= k <= kmax and n from the sharp threshold up
/// to nmax.
pub fn kn_points(kmax: u64, nmax: u64) -> Result<Vec<KnPoint>> {
    if kmax < 2 {
        return Err(Error::DomainError("need kmax >= 2".into()));
    }
    let mut points = Vec::new();
    for k in 2..=kmax {
        let cond = kn_condition(k, 1)?;
        for n in cond.sharp_threshold..=nmax {
            let x = k as f64 / n as f64;
            points.push(KnPoint { k, n, x, bound: disagreement_bound(x)? });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::clock_agreement;

    fn f(x: f64) -> f64 {
        2.0 * x / (1.0 + x)
    }

    #[test]
    fn inverse_integer_values() {
        assert_eq!(lb_inverse_integer(1).unwrap(), 1.0);
        assert!((lb_inverse_integer(2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(lb_inverse_integer(3).unwrap(), 0.5);
        assert!(lb_inverse_integer(0).is_err());
    }

    #[test]
    fn all_x_examples() {
        assert!((lb_all_x(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((lb_all_x(0.3).unwrap() - 0.45).abs() < 1e-15);
        // 1/3 in floating point snaps to the boundary.
        assert!((lb_all_x(1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        let third = RationalPoint::new(1, 3).unwrap();
        assert!((lb_all_x_rational(&third).unwrap() - 0.5).abs() < 1e-15);
        assert!(lb_all_x(0.0).is_err());
        assert!(lb_all_x(1.0).is_err());
    }

    #[test]
    fn pointwise_examples() {
        assert!((lb_pointwise(0.3).unwrap() - 0.45).abs() < 1e-15);
        let expected = 16.0 / 15.0 - 0.68;
        assert!((lb_pointwise(0.255).unwrap() - expected).abs() < 1e-12);
        assert!((lb_pointwise(0.25).unwrap() - 0.4).abs() < 1e-15);
        let quarter = RationalPoint::new(25, 100).unwrap();
        assert_eq!(quarter, RationalPoint::new(1, 4).unwrap());
        assert!((lb_pointwise_rational(&quarter).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn bounds_meet_f_exactly_at_inverse_integers() {
        for n in 2..=10u64 {
            let x = 1.0 / n as f64;
            let fx = disagreement_bound(x).unwrap();
            assert!((lb_all_x(x).unwrap() - fx).abs() <= 1e-12, "all_x at 1/{n}");
            assert!(
                (lb_pointwise(x).unwrap() - fx).abs() <= 1e-12,
                "pointwise at 1/{n}"
            );
        }
    }

    #[test]
    fn lower_envelope_never_exceeds_f() {
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let fx = disagreement_bound(x).unwrap();
            let lower = lb_all_x(x).unwrap().max(lb_pointwise(x).unwrap());
            assert!(lower <= fx + 1e-12, "x = {x}: {lower} > {fx}");
        }
    }

    #[test]
    fn small_x_ratio_brackets() {
        for j in 2..=6i32 {
            let x = 10f64.powi(-j);
            let ratio = lb_all_x(x).unwrap() / x;
            let slack = 10f64.powi(-j + 1);
            assert!(ratio <= 2.0 + 1e-12, "j = {j}");
            assert!(ratio >= 2.0 - slack, "j = {j}: {ratio}");
        }
    }

    #[test]
    fn perturb_examples() {
        let same = perturb_bound(f, 0.0, 0.0).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((same(x) - f(x)).abs() < 1e-15);
        }
        let lifted = perturb_bound(f, 0.1, 0.0).unwrap();
        assert!((lifted(0.0) - 0.2).abs() < 1e-15);
        let shifted = perturb_bound(f, 0.1, 0.1).unwrap();
        assert!((shifted(0.5) - (2.0 * 0.55 / 1.55 + 0.2)).abs() < 1e-15);
        assert!(perturb_bound(f, 0.1, 0.2).is_err());
        assert!(perturb_bound(f, 1.5, 0.0).is_err());
    }

    #[test]
    fn envelope_satisfies_difference_quotient_bounds() {
        // The two perturbations delta=0, eps=s/x and delta=eps=s/(1-x)
        // bound the envelope's slopes: for x < y,
        // -2/(1-x) <= (g(y)-g(x))/(y-x) <= 2/y.
        let g = |x: f64| lb_all_x(x).unwrap().max(lb_pointwise(x).unwrap());
        for i in 1..100 {
            for j in (i + 1)..100 {
                let (x, y) = (i as f64 / 100.0, j as f64 / 100.0);
                let quotient = (g(y) - g(x)) / (y - x);
                assert!(quotient <= 2.0 / y + 1e-9, "({x}, {y})");
                assert!(quotient >= -2.0 / (1.0 - x) - 1e-9, "({x}, {y})");
            }
        }
    }

    #[test]
    fn kn_condition_thresholds() {
        let c = kn_condition(2, 22).unwrap();
        assert!(c.sharp);
        assert_eq!(c.sharp_threshold, 22);
        assert!(!c.coarse);
        assert!(!kn_condition(2, 21).unwrap().sharp);
        let c = kn_condition(2, 24).unwrap();
        assert!(c.sharp && c.coarse);
        assert_eq!(c.coarse_threshold, 24);
        assert!(kn_condition(1, 10).is_err());
    }

    #[test]
    fn complement_family_tv_and_clock_agreement() {
        for n in [2u64, 4] {
            let family = witness_complement_family(n).unwrap();
            assert_eq!(family.len(), n as usize + 1);
            let expected = (n as f64 - 1.0) / (n as f64 + 1.0);
            for (i, j) in family.pairs() {
                let tv = family.member(i).tv_distance(family.member(j)).unwrap();
                assert!((tv - 1.0 / n as f64).abs() <= 1e-12);
                let agree = clock_agreement(family.member(i), family.member(j))
                    .unwrap()
                    .total();
                assert!((agree - expected).abs() <= 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn perturbed_family_tv_is_x() {
        let family = witness_perturbed_family(0.3).unwrap();
        assert_eq!(family.len(), 4, "n = 3 gives four members");
        let eps = (1.0 - 3.0 * 0.3) / 4.0;
        assert!((family.member(0).prob(crate::AtomId(0)) - eps).abs() <= 1e-12);
        for (i, j) in family.pairs() {
            let tv = family.member(i).tv_distance(family.member(j)).unwrap();
            assert!((tv - 0.3).abs() <= 1e-12);
        }
        // Inverse integer input degenerates to the complement family.
        let plain = witness_perturbed_family(0.25).unwrap();
        assert_eq!(plain.member(0).prob(crate::AtomId(0)), 0.0);
    }

    #[test]
    fn set_family_tv_matches_distance() {
        use crate::combi::SubsetSpace;
        let family = witness_set_family(3, 2).unwrap();
        assert_eq!(family.len(), 10);
        let space = SubsetSpace::new(3, 2).unwrap();
        for (i, j) in family.pairs() {
            let tv = family.member(i).tv_distance(family.member(j)).unwrap();
            let expected = space.distance(i, j) as f64 / 3.0;
            assert!((tv - expected).abs() <= 1e-12);
        }
        let tiny = witness_set_family(1, 1).unwrap();
        let tv = tiny.member(0).tv_distance(tiny.member(1)).unwrap();
        assert_eq!(tv, 1.0);
        assert!(witness_set_family(40, 20).is_err());
    }

    #[test]
    fn curve_rows() {
        let curve = emit_bounds_curve(&[0.25, 0.3, 0.5]).unwrap();
        let row = curve.rows[0];
        assert!((row.lower - 0.4).abs() < 1e-15);
        assert!((row.f_value - 0.4).abs() < 1e-15);
        let row = curve.rows[1];
        assert!((row.lower - 0.45).abs() < 1e-15);
        assert!((row.f_value - 0.46153846153846156).abs() < 1e-15);
        let row = curve.rows[2];
        assert!((row.lower - row.f_value).abs() < 1e-15);
        assert!(emit_bounds_curve(&[0.5, 0.3]).is_err());
        assert!(emit_bounds_curve(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn kn_point_listing() {
        let points = kn_points(3, 40).unwrap();
        assert!(points
            .iter()
            .all(|p| kn_condition(p.k, p.n).unwrap().sharp));
        assert!(points.iter().any(|p| p.k == 2 && p.n == 22));
        assert!(!points.iter().any(|p| p.k == 2 && p.n == 21));
        for p in &points {
            assert!((p.bound - f(p.x)).abs() < 1e-15);
        }
    }
}
