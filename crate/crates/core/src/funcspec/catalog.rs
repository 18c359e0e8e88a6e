//! Named builtin functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::expr::{BinOp, Expr, FuncExpr};
use super::pl::{IntRatio, PlSpec};
use super::{FuncSpec, PointFn};
use crate::scalar::{parse_rational, rational_to_literal};

/// Registered names. `power`, `linear` and `lifted` take arguments.
pub const NAMES: &[&str] = &[
    "example1_A",
    "example1_f",
    "example1_g",
    "product_minus_one",
    "skew_quadratic",
    "skew_quad_strict",
    "power",
    "sqrt",
    "linear",
    "lifted",
];

/// Named real parameters such as `p=2` or `c1=0.5`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(pub Vec<(String, BigRational)>);

impl Params {
    pub fn get(&self, key: &str) -> Option<&BigRational> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Parses `key=value` (value a decimal or fraction).
    pub fn push_assignment(&mut self, text: &str) -> Result<(), CatalogError> {
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| CatalogError::BadParameter(text.to_string()))?;
        let v = parse_rational(v).ok_or_else(|| CatalogError::BadParameter(text.to_string()))?;
        self.0.push((k.trim().to_string(), v));
        Ok(())
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog function '{0}'")]
    Unknown(String),
    #[error("bad parameter '{0}'")]
    BadParameter(String),
    #[error("'{name}' takes {expected} parameter(s), got {got}")]
    BadParameterCount {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("'{name}' has arity {expected}, requested {requested}")]
    BadArity {
        name: String,
        expected: usize,
        requested: usize,
    },
    #[error("'{0}' must be a one-variable function to be lifted")]
    NotLiftable(String),
}

/// A resolved catalog function.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub arity: usize,
    pub parameters: Vec<(String, BigRational)>,
    pub body: FuncSpec,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pl(knots: &[(IntRatio, IntRatio)], tail: IntRatio) -> FuncSpec {
    FuncSpec::Pl(PlSpec::from_ratios(knots, tail).expect("builtin spec is valid"))
}

fn expr(text: &str, arity: usize) -> FuncSpec {
    FuncSpec::Expr(FuncExpr::parse(text, arity).expect("builtin expression parses"))
}

fn check_arity(name: &str, expected: usize, requested: Option<usize>) -> Result<(), CatalogError> {
    match requested {
        Some(r) if r != expected => Err(CatalogError::BadArity {
            name: name.to_string(),
            expected,
            requested: r,
        }),
        _ => Ok(()),
    }
}

fn no_params(name: &str, params: &Params) -> Result<(), CatalogError> {
    if params.is_empty() {
        Ok(())
    } else {
        Err(CatalogError::BadParameterCount {
            name: name.to_string(),
            expected: 0,
            got: params.0.len(),
        })
    }
}

/// Splits `name(args)` into `("name", Some("args"))`.
fn split_call(name: &str) -> (&str, Option<&str>) {
    match name.find('(') {
        Some(open) if name.ends_with(')') => (&name[..open], Some(&name[open + 1..name.len() - 1])),
        _ => (name, None),
    }
}

/// Resolves `name` with `params` into a catalog entry. `arity` pins the
/// dimension for entries that accept several (`linear`, `lifted`).
pub fn catalog_entry(
    name: &str,
    params: &Params,
    arity: Option<usize>,
) -> Result<CatalogEntry, CatalogError> {
    let name = name.trim();
    let (head, args) = split_call(name);
    let mut params = params.clone();
    if let Some(args) = args {
        if head == "lifted" {
            return lifted(args, &params, arity);
        }
        for (i, a) in args.split(',').enumerate() {
            let v = parse_rational(a).ok_or_else(|| CatalogError::BadParameter(a.to_string()))?;
            let key = match (head, i) {
                ("power", 0) => "p".to_string(),
                ("linear", i) => format!("c{}", i + 1),
                _ => return Err(CatalogError::BadParameter(a.to_string())),
            };
            params.0.push((key, v));
        }
    } else if head == "lifted" {
        return Err(CatalogError::BadParameter(
            "lifted needs a base name: lifted(name)".into(),
        ));
    }

    let (arity_out, body) = match head {
        "example1_A" => (
            1,
            pl(
                &[
                    ((0, 1), (0, 1)),
                    ((4, 1), (4, 1)),
                    ((6, 1), (5, 1)),
                    ((12, 1), (10, 1)),
                ],
                (5, 4),
            ),
        ),
        "example1_f" => (
            1,
            pl(
                &[((0, 1), (0, 1)), ((4, 1), (4, 1)), ((6, 1), (5, 1))],
                (5, 6),
            ),
        ),
        "example1_g" => (1, pl(&[((0, 1), (0, 1)), ((20, 1), (20, 1))], (5, 4))),
        "product_minus_one" => (2, expr("(x1+1)*(x2+1) - 1", 2)),
        "skew_quadratic" => (2, expr("(x1-x2)^2 + 4*x2^2", 2)),
        "skew_quad_strict" => (2, expr("x1^2 + x2^2 + x1*x2", 2)),
        "sqrt" => (1, expr("x1^0.5", 1)),
        "power" => {
            if params.0.len() > 1 {
                return Err(CatalogError::BadParameterCount {
                    name: name.into(),
                    expected: 1,
                    got: params.0.len(),
                });
            }
            let p = match params.0.first() {
                Some((k, v)) if k == "p" => v.clone(),
                Some((k, _)) => return Err(CatalogError::BadParameter(k.clone())),
                None => int(2),
            };
            let e = Expr::binary(BinOp::Pow, Expr::Var(0), Expr::constant(p));
            (1, FuncSpec::Expr(FuncExpr::new(e, 1).expect("valid")))
        }
        "linear" => return linear(name, &params, arity),
        _ => return Err(CatalogError::Unknown(name.to_string())),
    };
    if !matches!(head, "power") {
        no_params(name, &params)?;
    }
    check_arity(name, arity_out, arity)?;
    Ok(CatalogEntry {
        name: name.to_string(),
        arity: arity_out,
        parameters: params.0,
        body,
    })
}

fn linear(name: &str, params: &Params, arity: Option<usize>) -> Result<CatalogEntry, CatalogError> {
    let indexed: Vec<(usize, BigRational)> = params
        .0
        .iter()
        .filter_map(|(k, v)| {
            k.strip_prefix('c')
                .and_then(|d| d.parse::<usize>().ok())
                .map(|i| (i, v.clone()))
        })
        .collect();
    let broadcast = params.get("c").cloned();
    for (k, _) in &params.0 {
        let ok = k == "c"
            || k.strip_prefix('c')
                .is_some_and(|d| d.parse::<usize>().is_ok_and(|i| i >= 1));
        if !ok {
            return Err(CatalogError::BadParameter(k.clone()));
        }
    }
    let n = arity
        .or_else(|| indexed.iter().map(|(i, _)| *i).max())
        .unwrap_or(1);
    if let Some(max) = indexed.iter().map(|(i, _)| *i).max() {
        if max > n {
            return Err(CatalogError::BadParameterCount {
                name: name.into(),
                expected: n,
                got: max,
            });
        }
    }
    let coefficients: Vec<BigRational> = (1..=n)
        .map(|i| {
            indexed
                .iter()
                .find(|(j, _)| *j == i)
                .map(|(_, v)| v.clone())
                .or_else(|| broadcast.clone())
                .unwrap_or_else(BigRational::one)
        })
        .collect();
    let mut e: Option<Expr> = None;
    for (i, c) in coefficients.iter().enumerate() {
        let term = Expr::binary(BinOp::Mul, Expr::constant(c.clone()), Expr::Var(i));
        e = Some(match e {
            None => term,
            Some(acc) => Expr::binary(BinOp::Add, acc, term),
        });
    }
    let body = FuncSpec::Expr(FuncExpr::new(e.expect("n >= 1"), n).expect("valid"));
    Ok(CatalogEntry {
        name: format!(
            "linear({})",
            coefficients
                .iter()
                .map(rational_to_literal)
                .collect::<Vec<_>>()
                .join(",")
        ),
        arity: n,
        parameters: coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("c{}", i + 1), c.clone()))
            .collect(),
        body,
    })
}

fn lifted(
    base_name: &str,
    params: &Params,
    arity: Option<usize>,
) -> Result<CatalogEntry, CatalogError> {
    let base = catalog_entry(base_name, params, None)?;
    if base.arity != 1 {
        return Err(CatalogError::NotLiftable(base_name.to_string()));
    }
    let n = arity.unwrap_or(2);
    if n == 0 {
        return Err(CatalogError::BadArity {
            name: format!("lifted({base_name})"),
            expected: 1,
            requested: 0,
        });
    }
    Ok(CatalogEntry {
        name: format!("lifted({})", base.name),
        arity: n,
        parameters: base.parameters,
        body: FuncSpec::Lifted {
            base: Box::new(base.body),
            arity: n,
        },
    })
}

/// Resolves a catalog function to its spec.
pub fn catalog_get(
    name: &str,
    params: &Params,
    arity: Option<usize>,
) -> Result<FuncSpec, CatalogError> {
    catalog_entry(name, params, arity).map(|e| e.body)
}

/// One representative instance of every catalog entry.
pub fn standard_entries() -> Vec<CatalogEntry> {
    let none = Params::default();
    [
        ("example1_A", None),
        ("example1_f", None),
        ("example1_g", None),
        ("product_minus_one", None),
        ("skew_quadratic", None),
        ("skew_quad_strict", None),
        ("power(2)", None),
        ("power(3)", None),
        ("sqrt", None),
        ("linear", Some(1)),
        ("linear(2,3)", Some(2)),
        ("lifted(example1_A)", Some(2)),
    ]
    .into_iter()
    .map(|(name, arity)| catalog_entry(name, &none, arity).expect("standard entry resolves"))
    .inspect(|e| debug_assert_eq!(e.arity, PointFn::arity(&e.body)))
    .collect()
}
