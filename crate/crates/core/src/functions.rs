//! Closed-form bounded continuous functions on ℝ.
//!
//! Descriptors form a small closed algebra so that every range interval is
//! computed symbolically and every evaluation is reproducible from a config
//! file. The JSON form is internally tagged by `kind`:
//!
//! ```text
//! {"kind":"tanh","a":1,"b":0}      tanh(a·x + b)
//! {"kind":"cos","a":2,"b":0}       cos(a·x + b)
//! {"kind":"stereo_x"}              2x / (1 + x²)
//! {"kind":"stereo_y"}              (x² − 1) / (1 + x²)
//! {"kind":"cheb","n":3,"inner":{…}} T_n(inner(x))
//! {"kind":"const","c":1}           c
//! {"kind":"affine","inner":{…},"scale":s,"shift":t}   s·inner(x) + t
//! ```

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::product_space::Interval;
use crate::{Error, Result};

/// A bounded continuous function ℝ → ℝ in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// `tanh(a·x + b)`
    Tanh { a: f64, b: f64 },
    /// `cos(a·x + b)`
    Cos { a: f64, b: f64 },
    /// First stereographic coordinate `2x / (1 + x²)`.
    StereoX,
    /// Second stereographic coordinate `(x² − 1) / (1 + x²)`.
    StereoY,
    /// Chebyshev polynomial of the first kind applied to `inner`.
    Cheb {
        n: u32,
        inner: Box<FunctionDescriptor>,
    },
    /// The constant function.
    Const { c: f64 },
    /// `scale · inner(x) + shift`
    Affine {
        inner: Box<FunctionDescriptor>,
        scale: f64,
        shift: f64,
    },
}

/// Evaluates the Chebyshev polynomial `T_n` at `t` by the three-term recurrence
/// `T_0 = 1`, `T_1 = t`, `T_{k+1} = 2t·T_k − T_{k−1}`.
pub fn chebyshev_t(n: u32, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = t;
    for _ in 1..n {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Image of the closed interval `[lo, hi]` under `T_n`.
///
/// Outside `[-1, 1]` the polynomial is monotone, and inside its interior
/// extrema sit at `cos(kπ/n)` with values `(-1)^k`, so the hull is the
/// min/max over the endpoints and the critical points that fall inside.
fn chebyshev_image(n: u32, range: Interval) -> Interval {
    let mut lo = chebyshev_t(n, range.lo);
    let mut hi = lo;
    let end = chebyshev_t(n, range.hi);
    lo = lo.min(end);
    hi = hi.max(end);
    for k in 1..n {
        let c = libm::cos(core::f64::consts::PI * k as f64 / n as f64);
        if range.lo < c && c < range.hi {
            let v = if k % 2 == 0 { 1.0 } else { -1.0 };
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Interval { lo, hi }
}

/// Returns `Cheb(n, Cos(1, 0))`, the polynomial expansion of `cos(n·x)` in `cos(x)`.
///
/// `n = 0` is rejected: the constant function needs no expansion.
pub fn chebyshev_expand(n: u32) -> Result<FunctionDescriptor> {
    if n == 0 {
        return Err(Error::InvalidDescriptor(
            "chebyshev expansion needs n >= 1; cos(0) is the constant 1".into(),
        ));
    }
    Ok(FunctionDescriptor::Cheb {
        n,
        inner: Box::new(FunctionDescriptor::cos(1.0, 0.0)),
    })
}

impl FunctionDescriptor {
    /// `tanh(a·x + b)`
    pub fn tanh(a: f64, b: f64) -> Self {
        Self::Tanh { a, b }
    }

    /// `cos(a·x + b)`
    pub fn cos(a: f64, b: f64) -> Self {
        Self::Cos { a, b }
    }

    /// `T_n ∘ inner`
    pub fn cheb(n: u32, inner: FunctionDescriptor) -> Self {
        Self::Cheb {
            n,
            inner: Box::new(inner),
        }
    }

    /// `scale · inner + shift`
    pub fn affine(inner: FunctionDescriptor, scale: f64, shift: f64) -> Self {
        Self::Affine {
            inner: Box::new(inner),
            scale,
            shift,
        }
    }

    /// Checks that every parameter is finite, every Chebyshev degree is
    /// positive and the range hull is finite.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidDescriptor(format!(
                    "{name} must be finite, got {v}"
                )))
            }
        };
        match self {
            Self::Tanh { a, b } | Self::Cos { a, b } => {
                finite("a", *a)?;
                finite("b", *b)
            }
            Self::StereoX | Self::StereoY => Ok(()),
            Self::Cheb { n, inner } => {
                if *n == 0 {
                    return Err(Error::InvalidDescriptor("cheb degree must be >= 1".into()));
                }
                inner.validate()?;
                let r = inner.range_interval();
                if chebyshev_t(*n, r.lo).is_finite() && chebyshev_t(*n, r.hi).is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidDescriptor(format!(
                        "cheb({n}) image overflows"
                    )))
                }
            }
            Self::Const { c } => finite("c", *c),
            Self::Affine {
                inner,
                scale,
                shift,
            } => {
                finite("scale", *scale)?;
                finite("shift", *shift)?;
                inner.validate()?;
                let r = self.range_interval();
                if r.lo.is_finite() && r.hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidDescriptor("affine image overflows".into()))
                }
            }
        }
    }

    fn evaluate_raw(&self, x: f64) -> f64 {
        match self {
            Self::Tanh { a, b } => libm::tanh(a * x + b),
            Self::Cos { a, b } => libm::cos(a * x + b),
            Self::StereoX => 2.0 * x / (1.0 + x * x),
            // 1 − 2/(1+x²) equals (x²−1)/(1+x²) and stays finite when x² overflows.
            Self::StereoY => 1.0 - 2.0 / (1.0 + x * x),
            Self::Cheb { n, inner } => chebyshev_t(*n, inner.evaluate(x)),
            Self::Const { c } => *c,
            Self::Affine {
                inner,
                scale,
                shift,
            } => scale * inner.evaluate(x) + shift,
        }
    }

    /// Evaluates the function at a finite `x`.
    ///
    /// The result always lies in [`range_interval`](Self::range_interval);
    /// rounding overshoot of at most a few ulps is clamped away.
    pub fn evaluate(&self, x: f64) -> f64 {
        let raw = self.evaluate_raw(x);
        match self {
            Self::Tanh { .. } | Self::Cos { .. } | Self::Const { .. } => raw,
            _ => self.range_interval().clamp(raw),
        }
    }

    /// The closed hull `[inf ran f, sup ran f]` of the range, computed symbolically.
    pub fn range_interval(&self) -> Interval {
        match self {
            Self::Tanh { a, b } => {
                if *a == 0.0 {
                    Interval::point(libm::tanh(*b))
                } else {
                    Interval { lo: -1.0, hi: 1.0 }
                }
            }
            Self::Cos { a, b } => {
                if *a == 0.0 {
                    Interval::point(libm::cos(*b))
                } else {
                    Interval { lo: -1.0, hi: 1.0 }
                }
            }
            Self::StereoX | Self::StereoY => Interval { lo: -1.0, hi: 1.0 },
            Self::Cheb { n, inner } => chebyshev_image(*n, inner.range_interval()),
            Self::Const { c } => Interval::point(*c),
            Self::Affine {
                inner,
                scale,
                shift,
            } => {
                let r = inner.range_interval();
                let (a, b) = (scale * r.lo + shift, scale * r.hi + shift);
                Interval {
                    lo: a.min(b),
                    hi: a.max(b),
                }
            }
        }
    }

    /// Normal form used for syntactic comparison.
    ///
    /// `Cheb(n, Cos(a, b))` becomes `Cos(n·a, n·b)`, nested Chebyshev degrees
    /// multiply and `Cheb(1, f)` becomes `f`.
    pub fn canonical(&self) -> FunctionDescriptor {
        match self {
            Self::Cheb { n, inner } => {
                let inner = inner.canonical();
                if *n == 1 {
                    return inner;
                }
                match inner {
                    Self::Cos { a, b } => Self::Cos {
                        a: *n as f64 * a,
                        b: *n as f64 * b,
                    },
                    Self::Cheb { n: m, inner } => Self::Cheb { n: n * m, inner },
                    other => Self::cheb(*n, other),
                }
            }
            Self::Affine {
                inner,
                scale,
                shift,
            } => Self::affine(inner.canonical(), *scale, *shift),
            other => other.clone(),
        }
    }

    /// Degree `d` such that `self = T_d ∘ source`, recognised syntactically.
    ///
    /// `Some(1)` means the two descriptors coincide. Besides explicit
    /// `Cheb` wrappers, `Cos(m·a, m·b)` is recognised over `Cos(a, b)` for any
    /// nonzero integer `m`, since `cos(mθ) = T_|m|(cos θ)`.
    pub fn chebyshev_degree_over(&self, source: &FunctionDescriptor) -> Option<u32> {
        derive_degree(&self.canonical(), &source.canonical())
    }

    fn strip_affine(&self) -> &FunctionDescriptor {
        match self {
            Self::Affine { inner, scale, .. } if *scale != 0.0 => inner.strip_affine(),
            other => other,
        }
    }
}

fn derive_degree(target: &FunctionDescriptor, source: &FunctionDescriptor) -> Option<u32> {
    use FunctionDescriptor::*;
    if target == source {
        return Some(1);
    }
    match (target, source) {
        (Cheb { n, inner }, _) => derive_degree(inner, source).and_then(|d| n.checked_mul(d)),
        (Cos { a: ta, b: tb }, Cos { a, b }) if *a != 0.0 => {
            let m = ta / a;
            if m == 0.0 || !m.is_finite() || libm::round(m) != m || m.abs() > u32::MAX as f64 {
                return None;
            }
            if m * a == *ta && m * b == *tb {
                Some(m.abs() as u32)
            } else {
                None
            }
        }
        _ => None,
    }
}

impl fmt::Display for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tanh { a, b } => write!(f, "tanh({a}x{b:+})"),
            Self::Cos { a, b } => write!(f, "cos({a}x{b:+})"),
            Self::StereoX => f.write_str("2x/(1+x^2)"),
            Self::StereoY => f.write_str("(x^2-1)/(1+x^2)"),
            Self::Cheb { n, inner } => write!(f, "T{n}({inner})"),
            Self::Const { c } => write!(f, "{c}"),
            Self::Affine {
                inner,
                scale,
                shift,
            } => write!(f, "{scale}*({inner}){shift:+}"),
        }
    }
}

/// An ordered, finite, nonempty family of descriptors whose coordinate 0
/// separates points of ℝ.
///
/// Coordinate 0 must be injective. This is enforced structurally: it is a
/// `Tanh` with `a ≠ 0`, or one of the stereographic coordinates paired with
/// the other at index 1, possibly under a non-degenerate affine map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FunctionDescriptor>", into = "Vec<FunctionDescriptor>")]
pub struct FunctionFamily {
    functions: Vec<FunctionDescriptor>,
}

impl FunctionFamily {
    pub fn new(functions: Vec<FunctionDescriptor>) -> Result<Self> {
        let head = functions
            .first()
            .ok_or_else(|| Error::InvalidFamily("family must be nonempty".into()))?;
        for (i, f) in functions.iter().enumerate() {
            f.validate()
                .map_err(|e| Error::InvalidFamily(format!("coordinate {i}: {e}")))?;
        }
        let injective = match head.strip_affine() {
            FunctionDescriptor::Tanh { a, .. } => *a != 0.0,
            FunctionDescriptor::StereoX => {
                matches!(
                    functions.get(1).map(|f| f.strip_affine()),
                    Some(FunctionDescriptor::StereoY)
                )
            }
            FunctionDescriptor::StereoY => {
                matches!(
                    functions.get(1).map(|f| f.strip_affine()),
                    Some(FunctionDescriptor::StereoX)
                )
            }
            _ => false,
        };
        if !injective {
            return Err(Error::InvalidFamily(format!(
                "coordinate 0 ({head}) is not a recognised injective function; use tanh(ax+b) with a != 0 or the stereographic pair"
            )));
        }
        Ok(Self { functions })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn functions(&self) -> &[FunctionDescriptor] {
        &self.functions
    }

    pub fn get(&self, n: usize) -> Option<&FunctionDescriptor> {
        self.functions.get(n)
    }

    /// Range intervals of all coordinates, in order.
    pub fn intervals(&self) -> Vec<Interval> {
        self.functions.iter().map(|f| f.range_interval()).collect()
    }

    /// The family with `f` appended as a new last coordinate.
    pub fn with(&self, f: FunctionDescriptor) -> Result<Self> {
        let mut functions = self.functions.clone();
        functions.push(f);
        Self::new(functions)
    }

    /// First coordinate equal to `T_d ∘ coordinate` for some degree `d`,
    /// as `(coordinate, d)`.
    pub fn derive(&self, target: &FunctionDescriptor) -> Option<(usize, u32)> {
        self.functions
            .iter()
            .enumerate()
            .find_map(|(j, f)| target.chebyshev_degree_over(f).map(|d| (j, d)))
    }
}

impl TryFrom<Vec<FunctionDescriptor>> for FunctionFamily {
    type Error = Error;

    fn try_from(functions: Vec<FunctionDescriptor>) -> Result<Self> {
        Self::new(functions)
    }
}

impl From<FunctionFamily> for Vec<FunctionDescriptor> {
    fn from(family: FunctionFamily) -> Self {
        family.functions
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cos1() -> FunctionDescriptor {
        FunctionDescriptor::cos(1.0, 0.0)
    }

    #[test]
    fn evaluates_named_points() {
        assert_eq!(FunctionDescriptor::tanh(1.0, 0.0).evaluate(0.0), 0.0);
        assert_eq!(FunctionDescriptor::StereoY.evaluate(0.0), -1.0);
        assert_eq!(FunctionDescriptor::StereoX.evaluate(0.0), 0.0);
        assert_eq!(FunctionDescriptor::StereoX.evaluate(1.0), 1.0);
    }

    #[test]
    fn cheb_two_of_cos_is_double_angle() {
        let f = FunctionDescriptor::cheb(2, cos1());
        for x in [0.0f64, 0.5, 1.3] {
            let oracle = 2.0 * x.cos() * x.cos() - 1.0;
            assert!((f.evaluate(x) - oracle).abs() <= 1e-12);
            assert!((f.evaluate(x) - (2.0 * x).cos()).abs() <= 1e-12);
        }
    }

    #[test]
    fn range_intervals() {
        let unit = Interval { lo: -1.0, hi: 1.0 };
        assert_eq!(FunctionDescriptor::tanh(1.0, 0.0).range_interval(), unit);
        assert_eq!(cos1().range_interval(), unit);
        assert_eq!(FunctionDescriptor::StereoX.range_interval(), unit);
        assert_eq!(FunctionDescriptor::StereoY.range_interval(), unit);
        assert_eq!(
            FunctionDescriptor::Const { c: 0.5 }.range_interval(),
            Interval::point(0.5)
        );
        assert_eq!(FunctionDescriptor::cheb(3, cos1()).range_interval(), unit);
    }

    #[test]
    fn cheb_range_matches_dense_sampling() {
        // Dense sampling over the inner range is an independent estimate of the hull.
        let cases = [
            FunctionDescriptor::cheb(3, cos1()),
            FunctionDescriptor::cheb(4, FunctionDescriptor::Const { c: 0.3 }),
            FunctionDescriptor::cheb(3, FunctionDescriptor::affine(cos1(), 0.25, 0.5)),
            FunctionDescriptor::cheb(2, FunctionDescriptor::affine(cos1(), 1.0, 1.0)),
            FunctionDescriptor::cheb(5, FunctionDescriptor::affine(cos1(), 0.1, -0.05)),
        ];
        for f in cases {
            let FunctionDescriptor::Cheb { n, inner } = &f else {
                unreachable!()
            };
            let r = inner.range_interval();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let steps = 200_000;
            for i in 0..=steps {
                let t = r.lo + (r.hi - r.lo) * i as f64 / steps as f64;
                let v = chebyshev_t(*n, t);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let got = f.range_interval();
            assert!((got.lo - lo).abs() < 1e-6, "{f}: {got:?} vs [{lo}, {hi}]");
            assert!((got.hi - hi).abs() < 1e-6, "{f}: {got:?} vs [{lo}, {hi}]");
        }
    }

    #[test]
    fn affine_range_flips_with_negative_scale() {
        let f = FunctionDescriptor::affine(FunctionDescriptor::tanh(1.0, 0.0), -2.0, 1.0);
        assert_eq!(f.range_interval(), Interval { lo: -1.0, hi: 3.0 });
    }

    #[test]
    fn chebyshev_expand_rejects_zero() {
        assert!(chebyshev_expand(0).is_err());
        assert_eq!(
            chebyshev_expand(3).unwrap(),
            FunctionDescriptor::cheb(3, cos1())
        );
    }

    #[test]
    fn chebyshev_expand_one_is_cos() {
        let f = chebyshev_expand(1).unwrap();
        for i in 0..1000 {
            let x = -50.0 + 0.1 * i as f64;
            assert_eq!(f.evaluate(x), cos1().evaluate(x));
        }
    }

    #[test]
    fn chebyshev_expand_matches_multiple_angle() {
        // Direct cos(nx) from std is the oracle.
        for (n, tol) in [(2u32, 1e-12), (12, 1e-9)] {
            let f = chebyshev_expand(n).unwrap();
            let mut worst = 0.0f64;
            for i in 0..10_000 {
                let x = -50.0 + 100.0 * i as f64 / 9_999.0;
                worst = worst.max((f.evaluate(x) - (n as f64 * x).cos()).abs());
            }
            assert!(worst <= tol, "n={n}: {worst}");
        }
    }

    #[test]
    fn cos_is_even_in_frequency() {
        for n in 1..=6 {
            let (p, q) = (
                FunctionDescriptor::cos(n as f64, 0.0),
                FunctionDescriptor::cos(-(n as f64), 0.0),
            );
            for i in 0..500 {
                let x = -25.0 + 0.1 * i as f64;
                assert_eq!(p.evaluate(x), q.evaluate(x));
            }
        }
    }

    #[test]
    fn json_schema_field_names() {
        let f: FunctionDescriptor = serde_json::from_str(
            r#"{"kind":"cheb","n":3,"inner":{"kind":"affine","inner":{"kind":"cos","a":2,"b":0},"scale":0.5,"shift":0}}"#,
        )
        .unwrap();
        assert_eq!(
            f,
            FunctionDescriptor::cheb(
                3,
                FunctionDescriptor::affine(FunctionDescriptor::cos(2.0, 0.0), 0.5, 0.0)
            )
        );
        let json = serde_json::to_string(&FunctionDescriptor::StereoX).unwrap();
        assert_eq!(json, r#"{"kind":"stereo_x"}"#);
        let json = serde_json::to_string(&FunctionDescriptor::Const { c: 1.0 }).unwrap();
        assert_eq!(json, r#"{"kind":"const","c":1.0}"#);
        let family: core::result::Result<FunctionFamily, _> =
            serde_json::from_str(r#"[{"kind":"cos","a":1,"b":0}]"#);
        assert!(family.is_err());
        let family: FunctionFamily =
            serde_json::from_str(r#"[{"kind":"tanh","a":1,"b":0},{"kind":"stereo_y"}]"#).unwrap();
        assert_eq!(family.len(), 2);
    }

    #[test]
    fn syntactic_degrees() {
        let c1 = cos1();
        assert_eq!(c1.chebyshev_degree_over(&c1), Some(1));
        assert_eq!(
            FunctionDescriptor::cos(2.0, 0.0).chebyshev_degree_over(&c1),
            Some(2)
        );
        assert_eq!(
            FunctionDescriptor::cos(-3.0, 0.0).chebyshev_degree_over(&c1),
            Some(3)
        );
        assert_eq!(
            chebyshev_expand(5).unwrap().chebyshev_degree_over(&c1),
            Some(5)
        );
        assert_eq!(
            FunctionDescriptor::cheb(2, FunctionDescriptor::cheb(3, c1.clone()))
                .chebyshev_degree_over(&c1),
            Some(6)
        );
        assert_eq!(
            FunctionDescriptor::cos(core::f64::consts::SQRT_2, 0.0).chebyshev_degree_over(&c1),
            None
        );
        assert_eq!(
            c1.chebyshev_degree_over(&FunctionDescriptor::cos(2.0, 0.0)),
            None
        );
        let t = FunctionDescriptor::tanh(1.0, 0.0);
        assert_eq!(
            FunctionDescriptor::cheb(2, t.clone()).chebyshev_degree_over(&t),
            Some(2)
        );
    }

    #[test]
    fn family_head_must_be_injective() {
        assert!(FunctionFamily::new(vec![]).is_err());
        assert!(FunctionFamily::new(vec![cos1()]).is_err());
        assert!(FunctionFamily::new(vec![FunctionDescriptor::tanh(0.0, 1.0)]).is_err());
        assert!(FunctionFamily::new(vec![FunctionDescriptor::StereoX]).is_err());
        assert!(FunctionFamily::new(vec![FunctionDescriptor::tanh(-2.0, 1.0), cos1()]).is_ok());
        assert!(FunctionFamily::new(vec![
            FunctionDescriptor::StereoX,
            FunctionDescriptor::StereoY
        ])
        .is_ok());
        assert!(FunctionFamily::new(vec![
            FunctionDescriptor::StereoY,
            FunctionDescriptor::StereoX
        ])
        .is_ok());
        assert!(FunctionFamily::new(vec![FunctionDescriptor::affine(
            FunctionDescriptor::tanh(1.0, 0.0),
            0.5,
            0.5
        )])
        .is_ok());
        assert!(FunctionFamily::new(vec![FunctionDescriptor::affine(
            FunctionDescriptor::tanh(1.0, 0.0),
            0.0,
            0.5
        )])
        .is_err());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(FunctionDescriptor::tanh(f64::NAN, 0.0).validate().is_err());
        assert!(FunctionDescriptor::cheb(0, cos1()).validate().is_err());
        assert!(FunctionDescriptor::affine(cos1(), f64::MAX, f64::MAX)
            .validate()
            .is_err());
    }

    #[test]
    fn stereo_is_finite_for_huge_inputs() {
        for x in [1e200, -1e200, f64::MAX] {
            assert!(FunctionDescriptor::StereoX.evaluate(x).is_finite());
            assert_eq!(FunctionDescriptor::StereoY.evaluate(x), 1.0);
        }
    }
}
