//! Pencils of quartics `s'(u, x) = w_inf(u) P_inf(x) + w_0(u) P_0(x)` on `P^1 x P^1`,
//! their branch locus in `u`, and the point checks on the auxiliary elliptic curves.

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::numfield::{verify_projective_point, NFElement, NFPoly, NumberField, TernaryForm};
use crate::ratpoly::{discriminant, rat, resultant, RatPoly, Rational};

/// Formal bidegree of `s'`: 2 in `u`, 4 in `x`.
const U_DEGREE: usize = 2;
const X_DEGREE: usize = 4;
/// Formal degree in `u` of the fiber discriminant (6 coefficients deep, each of degree 2).
const DISC_DEGREE: usize = 6 * U_DEGREE;

/// Projective points that must lie on a plane cubic.
#[derive(Clone, Debug)]
pub struct CurvePoints {
    pub curve: TernaryForm,
    pub points: Vec<[NFElement; 3]>,
}

#[derive(Clone, Debug)]
pub struct BundleSpec {
    pub p_inf: RatPoly,
    pub p_0: RatPoly,
    /// `(w_inf, w_0)`, each of degree at most 2 in `u`.
    pub weights: (RatPoly, RatPoly),
    /// Affine branch polynomial of the covering map `C -> P^1`.
    pub gamma_branch: RatPoly,
    /// Whether `u = inf` is a branch point of the covering map.
    pub gamma_branch_at_infinity: bool,
    /// Factors the branch locus is expected to contain.
    pub expected_factors: Vec<RatPoly>,
    pub curve_points: Option<CurvePoints>,
}

impl BundleSpec {
    /// Validates the pencil: separable coprime quartics and weights without a common zero.
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("P_inf", &self.p_inf), ("P_0", &self.p_0)] {
            if p.deg() != X_DEGREE {
                return invalid(format!("{name} must have degree 4"));
            }
            if discriminant(p)?.is_zero() {
                return invalid(format!("{name} is not separable"));
            }
        }
        if resultant(&self.p_inf, &self.p_0)?.is_zero() {
            return invalid("P_inf and P_0 share a root");
        }
        let (wi, w0) = &self.weights;
        if wi.is_zero() && w0.is_zero() {
            return invalid("both weights vanish");
        }
        if wi.deg() > U_DEGREE || w0.deg() > U_DEGREE {
            return invalid("weights must have degree at most 2");
        }
        if wi.gcd(w0).deg() > 0 {
            return invalid("weights share a zero");
        }
        if wi.deg() < U_DEGREE && w0.deg() < U_DEGREE {
            return invalid("weights share the zero u = inf");
        }
        if self.gamma_branch.is_zero() {
            return invalid("gamma branch polynomial is zero");
        }
        Ok(())
    }

    /// The same pencil in the chart `u -> 1/u`.
    pub fn at_infinity_chart(&self) -> BundleSpec {
        let flip = |w: &RatPoly| w.reversed(U_DEGREE);
        let n = self.gamma_branch.deg() + usize::from(self.gamma_branch_at_infinity);
        let gamma = self.gamma_branch.reversed(n);
        let at_inf = self.gamma_branch.coeff(0).is_zero();
        BundleSpec {
            p_inf: self.p_inf.clone(),
            p_0: self.p_0.clone(),
            weights: (flip(&self.weights.0), flip(&self.weights.1)),
            gamma_branch: gamma,
            gamma_branch_at_infinity: at_inf,
            expected_factors: vec![],
            curve_points: None,
        }
    }
}

/// `s'(u, x)` as the list of its `x^k` coefficients, each a polynomial in `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionPoly {
    pub coeffs: Vec<RatPoly>,
}

impl SectionPoly {
    pub fn fiber(&self, u: &Rational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c.eval(u)).collect())
    }

    /// The fiber over a point `u` of a number field.
    pub fn fiber_over(&self, field: &NumberField, u: &NFElement) -> NFPoly {
        let coeffs = self.coeffs.iter().map(|c| crate::numfield::eval_at(c, u)).collect();
        NFPoly::new(field, coeffs)
    }
}

pub fn section_poly(spec: &BundleSpec) -> SectionPoly {
    let (wi, w0) = &spec.weights;
    let coeffs = (0..=X_DEGREE)
        .map(|k| &(wi * &RatPoly::constant(spec.p_inf.coeff(k))) + &(w0 * &RatPoly::constant(spec.p_0.coeff(k))))
        .collect();
    SectionPoly { coeffs }
}

/// Newton interpolation through the given nodes.
fn interpolate(xs: &[Rational], ys: &[Rational]) -> RatPoly {
    let n = xs.len();
    let mut table = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut acc = RatPoly::constant(table[n - 1].clone());
    for i in (0..n - 1).rev() {
        let factor = RatPoly::new(vec![-xs[i].clone(), Rational::one()]);
        acc = &(&acc * &factor) + &RatPoly::constant(table[i].clone());
    }
    acc
}

/// The discriminant of the binary quartic fiber as a polynomial in `u`, of
/// formal degree 12. It agrees with `res_x(s', ds'/dx)` up to the leading coefficient.
pub fn fiber_discriminant(spec: &BundleSpec) -> Result<RatPoly> {
    spec.validate()?;
    let s = section_poly(spec);
    let lead = &s.coeffs[X_DEGREE];
    if lead.is_zero() {
        return Err(Error::Degenerate("every fiber has a root at x = inf".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut k: i64 = 0;
    while xs.len() < DISC_DEGREE + 2 {
        let u = rat(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
        k += 1;
        if lead.eval(&u).is_zero() {
            continue;
        }
        ys.push(discriminant(&s.fiber(&u))?);
        xs.push(u);
    }
    let d = interpolate(&xs[..=DISC_DEGREE], &ys[..=DISC_DEGREE]);
    debug_assert_eq!(d.eval(&xs[DISC_DEGREE + 1]), ys[DISC_DEGREE + 1]);
    Ok(d)
}

/// Squarefree primitive polynomial whose roots are the finite `u` with a singular fiber.
pub fn branch_locus_u(spec: &BundleSpec) -> Result<RatPoly> {
    let (wi, w0) = &spec.weights;
    let proportional = wi.is_zero() || w0.is_zero() || wi.scale(&w0.lc()) == w0.scale(&wi.lc());
    if proportional {
        return Err(Error::Degenerate("the fiber does not depend on u".into()));
    }
    let d = fiber_discriminant(spec)?;
    if d.is_zero() {
        return Err(Error::Degenerate("every fiber is singular".into()));
    }
    Ok(d.squarefree_part().primitive())
}

/// Whether the fiber over `u = inf` is singular.
pub fn branch_at_infinity(spec: &BundleSpec) -> Result<bool> {
    Ok(fiber_discriminant(spec)?.deg() < DISC_DEGREE)
}

/// Whether the branch locus of the pencil misses that of the covering map.
pub fn branch_disjoint(spec: &BundleSpec) -> Result<bool> {
    let r = branch_locus_u(spec)?;
    if r.gcd(&spec.gamma_branch).deg() > 0 {
        return Ok(false);
    }
    Ok(!(spec.gamma_branch_at_infinity && branch_at_infinity(spec)?))
}

/// Outcome of every check on a pencil.
#[derive(Clone, Debug)]
pub struct BundleReport {
    pub resultant: Rational,
    pub branch_locus: RatPoly,
    pub branch_at_infinity: bool,
    pub expected_factors: Vec<(RatPoly, bool)>,
    pub disjoint: bool,
    pub points_on_curve: Vec<bool>,
}

impl BundleReport {
    pub fn all_pass(&self) -> bool {
        !self.resultant.is_zero()
            && self.disjoint
            && self.expected_factors.iter().all(|(_, ok)| *ok)
            && self.points_on_curve.iter().all(|&ok| ok)
    }
}

pub fn check_bundle(spec: &BundleSpec) -> Result<BundleReport> {
    spec.validate()?;
    let branch_locus = branch_locus_u(spec)?;
    let expected_factors = spec.expected_factors.iter().map(|f| (f.clone(), f.divides(&branch_locus))).collect();
    let points_on_curve = match &spec.curve_points {
        None => vec![],
        Some(cp) => cp.points.iter().map(|pt| verify_projective_point(&cp.curve, pt)).collect::<Result<_>>()?,
    };
    Ok(BundleReport {
        resultant: resultant(&spec.p_inf, &spec.p_0)?,
        branch_at_infinity: branch_at_infinity(spec)?,
        disjoint: branch_disjoint(spec)?,
        branch_locus,
        expected_factors,
        points_on_curve,
    })
}

/// The plane cubic `w1^2 w2 = w0^3 + A w0 w2^2 + B w2^3`.
pub fn weierstrass(a: i64, b: i64) -> TernaryForm {
    TernaryForm::new(vec![(rat(1), [0, 2, 1]), (rat(-1), [3, 0, 0]), (rat(-a), [1, 0, 2]), (rat(-b), [0, 0, 3])])
        .expect("homogeneous cubic")
}

fn poly(c: &[i64]) -> RatPoly {
    RatPoly::from_ints(c)
}

fn point(field: &NumberField, coords: [&[i64]; 3]) -> [NFElement; 3] {
    coords.map(|c| field.elem(c.iter().map(|&n| rat(n)).collect()))
}

/// Pencil of the weak-approximation example over `Q(sqrt 3)`.
pub fn bundle_wa_sqrt3() -> BundleSpec {
    let l = NumberField::from_ints(&[-3, 0, 1]).expect("x^2 - 3");
    let p_0 = &poly(&[1, 0, 99])
        * &RatPoly::new(vec![rat(1), rat(0), rat(5428)]).scale(&Rational::new(1.into(), 5329.into()));
    BundleSpec {
        p_inf: &poly(&[1, 0, -1]) * &poly(&[-73, 0, 1]),
        p_0,
        weights: (poly(&[0, 0, 1]), poly(&[1])),
        gamma_branch: poly(&[48, 48, 12, 1]),
        gamma_branch_at_infinity: true,
        expected_factors: vec![
            poly(&[-537_372, 0, 5329]),
            poly(&[-1, 0, 389_017]),
            poly(&[5329, 0, 157_730_624, 0, 27_625_536]),
        ],
        curve_points: Some(CurvePoints {
            curve: weierstrass(0, -16),
            points: vec![point(&l, [&[4], &[0, 4], &[1]]), point(&l, [&[4], &[0, -4], &[1]])],
        }),
    }
}

/// Pencil of the Hasse-principle example over the cubic field `Q(zeta_7 + zeta_7^-1)`.
pub fn bundle_hp_cubic() -> BundleSpec {
    let l = NumberField::from_ints(&[-1, -2, 1, 1]).expect("cubic");
    let big = |s: &str| -> Rational { Rational::from_integer(s.parse().expect("integer literal")) };
    BundleSpec {
        p_inf: poly(&[-14 * 89_726, 0, 0, 0, 14]),
        p_0: &poly(&[-878_755_181, 0, 1]) * &poly(&[-4_393_775_906, 0, 5]),
        weights: (poly(&[0, 0, 1]), poly(&[1])),
        gamma_branch: poly(&[-5_764_801, 0, 129_654, 0, 27]),
        gamma_branch_at_infinity: true,
        expected_factors: vec![
            poly(&[5, 0, 14]),
            RatPoly::new(vec![-big("137894762198231040"), rat(0), rat(44_863)]),
            RatPoly::new(vec![rat(1), rat(0), -big("216218987126801139936"), rat(0), rat(70_345_184)]),
        ],
        curve_points: Some(CurvePoints {
            curve: weierstrass(-343, -2401),
            points: vec![
                point(&l, [&[-7, 14, 7], &[0], &[1]]),
                point(&l, [&[-14, -7, 7], &[0], &[1]]),
                point(&l, [&[21, -7, -14], &[0], &[1]]),
            ],
        }),
    }
}

/// Pencil of the Hasse-principle example over `Q(sqrt 3)` using the real place.
pub fn bundle_hp_real_sqrt3() -> BundleSpec {
    let l = NumberField::from_ints(&[-3, 0, 1]).expect("x^2 - 3");
    BundleSpec {
        p_inf: poly(&[5 * 805, 0, 0, 0, 5]),
        p_0: poly(&[-5 * 115, 0, 0, 0, -5]),
        weights: (poly(&[0, 0, 1]), poly(&[1])),
        gamma_branch: poly(&[48, 48, 12, 1]),
        gamma_branch_at_infinity: true,
        expected_factors: vec![poly(&[-1, 0, 1]), poly(&[-1, 0, 7])],
        curve_points: Some(CurvePoints {
            curve: weierstrass(0, -16),
            points: vec![point(&l, [&[4], &[0, 4], &[1]]), point(&l, [&[4], &[0, -4], &[1]])],
        }),
    }
}

/// Pencil of the Hasse-principle example over `Q(i)`.
pub fn bundle_hp_gaussian() -> BundleSpec {
    let l = NumberField::from_ints(&[1, 0, 1]).expect("x^2 + 1");
    BundleSpec {
        p_inf: poly(&[30, 0, -20, 0, 2]),
        p_0: poly(&[-150, 0, 78, 0, -10]),
        weights: (poly(&[2, 0, 1]), poly(&[0, 1])),
        gamma_branch: poly(&[1, 0, 1]),
        gamma_branch_at_infinity: true,
        expected_factors: vec![],
        curve_points: Some(CurvePoints {
            curve: weierstrass(0, -16),
            points: vec![point(&l, [&[0], &[0, 4], &[1]]), point(&l, [&[0], &[0, -4], &[1]])],
        }),
    }
}

/// The bundled pencils with their identifiers.
pub fn builtin_bundles() -> Vec<(&'static str, BundleSpec)> {
    vec![
        ("bundle-wa-sqrt3", bundle_wa_sqrt3()),
        ("bundle-hp-cubic", bundle_hp_cubic()),
        ("bundle-hp-real-sqrt3", bundle_hp_real_sqrt3()),
        ("bundle-hp-gaussian", bundle_hp_gaussian()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;
    use proptest::prelude::*;

    fn toy() -> BundleSpec {
        BundleSpec {
            p_inf: poly(&[1, 0, 0, 0, -1]),
            p_0: poly(&[-2, 0, 0, 0, 1]),
            weights: (poly(&[0, 0, 1]), poly(&[1])),
            gamma_branch: poly(&[1, 0, 1]),
            gamma_branch_at_infinity: false,
            expected_factors: vec![],
            curve_points: None,
        }
    }

    #[test]
    fn fibers_of_the_section() {
        let s = section_poly(&toy());
        assert_eq!(s.fiber(&rat(0)), poly(&[-2, 0, 0, 0, 1]));
        let spec = bundle_wa_sqrt3();
        let u = ratio(3, 7);
        let want = &spec.p_inf.scale(&(&u * &u)) + &spec.p_0;
        assert_eq!(section_poly(&spec).fiber(&u), want);
    }

    #[test]
    fn gaussian_fiber_at_i() {
        let spec = bundle_hp_gaussian();
        let qi = NumberField::from_ints(&[1, 0, 1]).unwrap();
        let i = qi.theta();
        let fiber = section_poly(&spec).fiber_over(&qi, &i);
        let p_inf = NFPoly::from_ratpoly(&qi, &spec.p_inf);
        let p_0 = NFPoly::from_ratpoly(&qi, &spec.p_0);
        let want: Vec<NFElement> = (0..=4).map(|k| &p_inf.coeff(k) + &(&i * &p_0.coeff(k))).collect();
        assert_eq!(fiber, NFPoly::new(&qi, want));
    }

    #[test]
    fn bundled_pencils() {
        for (id, spec) in builtin_bundles() {
            let r = check_bundle(&spec).unwrap();
            assert!(!r.resultant.is_zero(), "{id}");
            assert!(r.disjoint, "{id}");
            assert!(!r.branch_at_infinity, "{id}");
            assert!(r.points_on_curve.iter().all(|&b| b), "{id}");
        }
        assert!(check_bundle(&bundle_wa_sqrt3()).unwrap().all_pass());
        assert!(check_bundle(&bundle_hp_real_sqrt3()).unwrap().all_pass());
        assert!(check_bundle(&bundle_hp_gaussian()).unwrap().all_pass());
    }

    #[test]
    fn cubic_pencil_has_exact_quadratic_factor() {
        let r = check_bundle(&bundle_hp_cubic()).unwrap();
        let exact = RatPoly::new(vec![Rational::from_integer("-5120760399934309".parse().unwrap()), rat(0), rat(1666)]);
        assert!(exact.divides(&r.branch_locus));
        let oks: Vec<bool> = r.expected_factors.iter().map(|f| f.1).collect();
        assert_eq!(oks, vec![true, false, true]);
    }

    #[test]
    fn shared_branch_points_are_detected() {
        let mut spec = bundle_hp_real_sqrt3();
        spec.gamma_branch = branch_locus_u(&spec).unwrap();
        spec.gamma_branch_at_infinity = false;
        assert!(!branch_disjoint(&spec).unwrap());
    }

    #[test]
    fn constant_pencil_is_degenerate() {
        let mut spec = toy();
        spec.weights = (poly(&[1]), RatPoly::zero());
        assert!(matches!(branch_locus_u(&spec), Err(Error::Degenerate(_))));
        spec.weights = (poly(&[2, 0, 1]), poly(&[4, 0, 2]));
        assert!(spec.validate().is_err());
    }

    #[test]
    fn rejects_bad_pencils() {
        let mut spec = toy();
        spec.p_0 = &poly(&[1, 0, -1]) * &poly(&[3, 0, 1]);
        assert!(spec.validate().is_err());
        let mut spec = toy();
        spec.p_inf = &poly(&[1, 2, 1]) * &poly(&[1, 0, 1]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn real_pencil_degenerates_at_rational_branch_points() {
        let spec = bundle_hp_real_sqrt3();
        let r = branch_locus_u(&spec).unwrap();
        for u in [rat(1), rat(-1)] {
            assert!(r.eval(&u).is_zero());
            assert_eq!(section_poly(&spec).fiber(&u).deg(), 0);
        }
    }

    #[test]
    fn chart_at_infinity_agrees() {
        for (_, spec) in builtin_bundles() {
            let d = fiber_discriminant(&spec).unwrap();
            let flipped = spec.at_infinity_chart();
            assert_eq!(fiber_discriminant(&flipped).unwrap(), d.reversed(DISC_DEGREE));
            assert_eq!(branch_disjoint(&flipped).unwrap(), branch_disjoint(&spec).unwrap());
        }
    }

    proptest! {
        #![proptest_config(crate::testutil::config(20))]
        #[test]
        fn fibers_off_the_branch_locus_are_separable(n in -500i64..500, d in 1i64..60, which in 0usize..4) {
            let (_, spec) = builtin_bundles().swap_remove(which);
            let u = ratio(n, d);
            let r = branch_locus_u(&spec).unwrap();
            prop_assume!(!r.eval(&u).is_zero());
            let fiber = section_poly(&spec).fiber(&u);
            prop_assert!(fiber.deg() < 4 || !discriminant(&fiber).unwrap().is_zero());
        }
    }
}
