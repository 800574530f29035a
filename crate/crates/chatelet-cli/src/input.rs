//! JSON input files: surfaces and fibration pencils.

use std::path::Path;

use chatelet::chatelet::ChateletSurface;
use chatelet::fibration::{weierstrass, BundleSpec, CurvePoints};
use chatelet::numfield::{NFElement, NFPoly, NumberField};
use chatelet::ratpoly::parse_rational;
use chatelet::{Error, RatPoly, Rational};
use serde::Deserialize;

/// A rational written as an integer or a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<Rational, Error> {
        match self {
            Scalar::Int(n) => Ok(Rational::from_integer((*n).into())),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

/// A field element: a rational, or its coordinates in the power basis of `t`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Scalar(Scalar),
    Coords(Vec<Scalar>),
}

impl Coeff {
    pub fn value(&self, field: &NumberField) -> Result<NFElement, Error> {
        match self {
            Coeff::Scalar(s) => Ok(field.from_rational(&s.value()?)),
            Coeff::Coords(cs) => {
                if cs.len() > field.degree() {
                    return Err(Error::InvalidInput(format!(
                        "{} coordinates for a field of degree {}",
                        cs.len(),
                        field.degree()
                    )));
                }
                Ok(field.elem(cs.iter().map(Scalar::value).collect::<Result<_, _>>()?))
            }
        }
    }
}

/// `y^2 - a z^2 = P(x)`, given either by `p` or by `k`, `f1`, `f2`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    /// Defining polynomial of the base field, lowest degree first; Q when absent.
    #[serde(default)]
    pub field: Option<Vec<i64>>,
    pub a: Coeff,
    #[serde(default)]
    pub p: Option<Vec<Coeff>>,
    #[serde(default)]
    pub k: Option<Coeff>,
    #[serde(default)]
    pub f1: Option<Vec<Coeff>>,
    #[serde(default)]
    pub f2: Option<Vec<Coeff>>,
    /// Extension to analyze the base change over, lowest degree first.
    #[serde(default)]
    pub extension: Option<Vec<i64>>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn field_from(coeffs: Option<&[i64]>) -> Result<NumberField, Error> {
    match coeffs {
        None => Ok(NumberField::rationals()),
        Some(c) => NumberField::from_ints(c),
    }
}

fn nf_poly(field: &NumberField, cs: &[Coeff]) -> Result<NFPoly, Error> {
    Ok(NFPoly::new(field, cs.iter().map(|c| c.value(field)).collect::<Result<_, _>>()?))
}

impl SurfaceFile {
    pub fn surface(&self) -> Result<ChateletSurface, Error> {
        let field = field_from(self.field.as_deref())?;
        let a = self.a.value(&field)?;
        match (&self.p, &self.f1, &self.f2) {
            (Some(p), None, None) => {
                if self.k.is_some() {
                    return Err(Error::InvalidInput("k is only used with f1 and f2".into()));
                }
                ChateletSurface::new(a, nf_poly(&field, p)?, None)
            }
            (None, Some(f1), Some(f2)) => {
                let k = match &self.k {
                    Some(k) => k.value(&field)?,
                    None => field.one(),
                };
                let f1 = nf_poly(&field, f1)?;
                let f2 = nf_poly(&field, f2)?;
                let p = f1.mul(&f2).scale(&k);
                ChateletSurface::new(a, p, Some(chatelet::chatelet::Factorization { k, f1, f2 }))
            }
            _ => Err(Error::InvalidInput("give either p, or f1 and f2 (with optional k)".into())),
        }
    }

    pub fn extension_field(&self) -> Result<Option<NumberField>, Error> {
        self.extension.as_deref().map(NumberField::from_ints).transpose()
    }
}

pub fn rat_poly(cs: &[Scalar]) -> Result<RatPoly, Error> {
    Ok(RatPoly::new(cs.iter().map(Scalar::value).collect::<Result<_, _>>()?))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    /// `w1^2 w2 = w0^3 + A w0 w2^2 + B w2^3`.
    pub weierstrass: [i64; 2],
    /// Field of the point coordinates, lowest degree first.
    pub field: Vec<i64>,
    /// Projective points, each coordinate in the power basis of the field.
    pub points: Vec<[Vec<Scalar>; 3]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub p_inf: Vec<Scalar>,
    pub p_0: Vec<Scalar>,
    pub weights: [Vec<Scalar>; 2],
    pub gamma_branch: Vec<Scalar>,
    #[serde(default)]
    pub gamma_branch_at_infinity: bool,
    #[serde(default)]
    pub expected_factors: Vec<Vec<Scalar>>,
    #[serde(default)]
    pub curve: Option<CurveFile>,
}

impl BundleFile {
    pub fn spec(&self) -> Result<BundleSpec, Error> {
        let curve_points = match &self.curve {
            None => None,
            Some(c) => {
                let field = NumberField::from_ints(&c.field)?;
                let coord = |v: &Vec<Scalar>| Coeff::Coords(v.clone()).value(&field);
                let points = c
                    .points
                    .iter()
                    .map(|pt| Ok([coord(&pt[0])?, coord(&pt[1])?, coord(&pt[2])?]))
                    .collect::<Result<_, Error>>()?;
                Some(CurvePoints { curve: weierstrass(c.weierstrass[0], c.weierstrass[1]), points })
            }
        };
        let spec = BundleSpec {
            p_inf: rat_poly(&self.p_inf)?,
            p_0: rat_poly(&self.p_0)?,
            weights: (rat_poly(&self.weights[0])?, rat_poly(&self.weights[1])?),
            gamma_branch: rat_poly(&self.gamma_branch)?,
            gamma_branch_at_infinity: self.gamma_branch_at_infinity,
            expected_factors: self.expected_factors.iter().map(|f| rat_poly(f)).collect::<Result<_, _>>()?,
            curve_points,
        };
        spec.validate()?;
        Ok(spec)
    }
}
