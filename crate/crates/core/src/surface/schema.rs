//! JSON surface descriptions.

use serde::{Deserialize, Serialize};

use super::{BoxDomain, Surface};
use crate::error::{Error, Result};
use crate::poly::{Poly, TermLiteral};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKindTag {
    TGraph,
    IntrinsicY1,
    Implicit,
    Helicoid,
    VerticalHyperplane,
    Hyperplane,
    Saddle,
}

/// `{"n", "kind", "poly", "box", "a", "b", "c", "d"}`; which keys are
/// required depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub n: usize,
    pub kind: SurfaceKindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<TermLiteral>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
}

fn missing(key: &str, kind: SurfaceKindTag) -> Error {
    Error::InvalidParameter(format!("surface.{key} is required for kind {kind:?}"))
}

fn unused(key: &str, present: bool, kind: SurfaceKindTag) -> Result<()> {
    if present {
        Err(Error::InvalidParameter(format!("surface.{key} is not used by kind {kind:?}")))
    } else {
        Ok(())
    }
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<Surface> {
        let kind = self.kind;
        let n = self.n;
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let poly = |nvars: usize| -> Result<Poly<f64>> {
            let lits = self.poly.as_ref().ok_or_else(|| missing("poly", kind))?;
            Poly::from_literals(nvars, lits)
        };
        let domain = || -> Result<Option<BoxDomain>> {
            self.domain
                .as_ref()
                .map(|b| BoxDomain::new(b.lo.clone(), b.hi.clone()))
                .transpose()
        };
        let uses_poly = matches!(
            kind,
            SurfaceKindTag::TGraph | SurfaceKindTag::IntrinsicY1 | SurfaceKindTag::Implicit
        );
        let uses_box = matches!(kind, SurfaceKindTag::IntrinsicY1 | SurfaceKindTag::Implicit);
        let uses_ab = matches!(kind, SurfaceKindTag::VerticalHyperplane | SurfaceKindTag::Hyperplane);
        unused("poly", !uses_poly && self.poly.is_some(), kind)?;
        unused("box", !uses_box && self.domain.is_some(), kind)?;
        unused("a", !uses_ab && self.a.is_some(), kind)?;
        unused("b", !uses_ab && self.b.is_some(), kind)?;
        unused("c", !uses_ab && self.c.is_some(), kind)?;
        unused("d", kind != SurfaceKindTag::Hyperplane && self.d.is_some(), kind)?;
        match kind {
            SurfaceKindTag::TGraph => Surface::t_graph(n, poly(2 * n)?),
            SurfaceKindTag::IntrinsicY1 => {
                let dom = domain()?.ok_or_else(|| missing("box", kind))?;
                Surface::intrinsic_y1(n, poly(2 * n)?, dom)
            }
            SurfaceKindTag::Implicit => Surface::implicit(n, poly(2 * n + 1)?, domain()?),
            SurfaceKindTag::Helicoid => {
                if n != 1 {
                    return Err(Error::InvalidParameter("surface.n must be 1 for the helicoid".into()));
                }
                Ok(Surface::helicoid())
            }
            SurfaceKindTag::VerticalHyperplane | SurfaceKindTag::Hyperplane => {
                let a = self.a.as_ref().ok_or_else(|| missing("a", kind))?;
                let b = self.b.as_ref().ok_or_else(|| missing("b", kind))?;
                if a.len() != n || b.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "surface.a and surface.b must have length n = {n}"
                    )));
                }
                let c = self.c.ok_or_else(|| missing("c", kind))?;
                if kind == SurfaceKindTag::VerticalHyperplane {
                    Surface::vertical_hyperplane(a, b, c)
                } else {
                    Surface::hyperplane(a, b, c, self.d.ok_or_else(|| missing("d", kind))?)
                }
            }
            SurfaceKindTag::Saddle => Surface::saddle(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> std::result::Result<SurfaceSpec, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn builtins_parse_and_build() {
        let s = parse(r#"{"n": 2, "kind": "saddle"}"#).unwrap();
        assert_eq!(s.build().unwrap().n(), 2);
        let s = parse(r#"{"n": 2, "kind": "hyperplane", "a": [1, -2], "b": [0.5, 0], "c": 1, "d": 3}"#).unwrap();
        assert!(s.build().is_ok());
        let s = parse(r#"{"n": 1, "kind": "helicoid"}"#).unwrap();
        assert!(s.build().is_ok());
    }

    #[test]
    fn polynomial_kinds() {
        let s = parse(
            r#"{"n": 1, "kind": "intrinsic-y1",
                "poly": [{"coeff": 0.5, "exps": [1, 1]}],
                "box": {"lo": [-1, -1], "hi": [1, 1]}}"#,
        )
        .unwrap();
        assert!(s.build().unwrap().intrinsic_graph().is_some());
        let s = parse(r#"{"n": 1, "kind": "implicit", "poly": [{"coeff": 1, "exps": [0, 0, 1]}]}"#).unwrap();
        assert!(s.build().is_ok());
    }

    #[test]
    fn schema_violations() {
        assert!(parse(r#"{"n": 1, "kind": "saddle", "colour": 3}"#).is_err());
        assert!(parse(r#"{"n": 1, "kind": "torus"}"#).is_err());
        let s = parse(r#"{"n": 1, "kind": "intrinsic-y1", "poly": []}"#).unwrap();
        assert!(s.build().unwrap_err().to_string().contains("box"));
        let s = parse(r#"{"n": 2, "kind": "helicoid"}"#).unwrap();
        assert!(s.build().is_err());
        let s = parse(r#"{"n": 1, "kind": "saddle", "a": [1]}"#).unwrap();
        assert!(s.build().is_err());
        let s = parse(r#"{"n": 1, "kind": "t-graph", "poly": [{"coeff": 1, "exps": [1]}]}"#).unwrap();
        assert!(s.build().is_err());
    }
}
