use serde::Serialize;

use super::{NamedCheck, TheoremError};
use crate::funcspec::FuncSpec;
use crate::grid::{sample, GridFn, GridSpec};
use crate::props::{
    check_directionally_concave, check_directionally_convex, check_dominated, check_linear,
    check_subadditive, check_superadditive, check_zero_origin, Tolerance,
};
use crate::scalar::Scalar;

/// Hypothesis sets under which no aggregation function has sub transform
/// `f` and super transform `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `f` strictly directionally concave, `g` super-additive and not linear.
    ConcaveF,
    /// `f` sub-additive and not linear, `g` strictly directionally convex.
    ConvexG,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    ObstructionFound,
    NoTheoremObstruction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct BranchReport<T> {
    pub branch: Branch,
    pub hypotheses: Vec<NamedCheck<T>>,
    pub satisfied: bool,
}

/// Outcome of screening a candidate pair `(f, g)`. Hypothesis detail is
/// always reported; no obstruction does not mean a realizing function
/// exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ScreenerReport<T> {
    pub f: String,
    pub g: String,
    pub common: Vec<NamedCheck<T>>,
    pub branches: Vec<BranchReport<T>>,
    pub conclusion: Conclusion,
    pub obstruction_branch: Option<Branch>,
}

/// Samples both functions and screens the grid pair.
pub fn screen_pair<T: Scalar>(
    f: &FuncSpec,
    g: &FuncSpec,
    spec: &GridSpec,
    tol: Tolerance,
) -> Result<ScreenerReport<T>, TheoremError> {
    let fa: GridFn<T> = sample(f, spec)?;
    let ga: GridFn<T> = sample(g, spec)?;
    let mut report = screen_grids(&fa, &ga, tol)?;
    report.f = f.to_string();
    report.g = g.to_string();
    Ok(report)
}

/// Screens two grid functions on a common grid.
pub fn screen_grids<T: Scalar>(
    f: &GridFn<T>,
    g: &GridFn<T>,
    tol: Tolerance,
) -> Result<ScreenerReport<T>, TheoremError> {
    let common = vec![
        NamedCheck::holds("f vanishes at the origin", check_zero_origin(f, tol)),
        NamedCheck::holds("g vanishes at the origin", check_zero_origin(g, tol)),
        NamedCheck::holds("f <= g", check_dominated(f, g, tol)?),
    ];
    let concave_f = vec![
        NamedCheck::holds(
            "f strictly directionally concave",
            check_directionally_concave(f, true, tol),
        ),
        NamedCheck::holds("g super-additive", check_superadditive(g, false, tol)),
        NamedCheck::fails("g linear", check_linear(g, tol)),
    ];
    let convex_g = vec![
        NamedCheck::holds("f sub-additive", check_subadditive(f, false, tol)),
        NamedCheck::fails("f linear", check_linear(f, tol)),
        NamedCheck::holds(
            "g strictly directionally convex",
            check_directionally_convex(g, true, tol),
        ),
    ];
    let common_ok = common.iter().all(|c| c.satisfied);
    let branches: Vec<BranchReport<T>> =
        [(Branch::ConcaveF, concave_f), (Branch::ConvexG, convex_g)]
            .into_iter()
            .map(|(branch, hypotheses)| {
                let satisfied = common_ok && hypotheses.iter().all(|c| c.satisfied);
                BranchReport {
                    branch,
                    hypotheses,
                    satisfied,
                }
            })
            .collect();
    let obstruction_branch = branches.iter().find(|b| b.satisfied).map(|b| b.branch);
    Ok(ScreenerReport {
        f: String::new(),
        g: String::new(),
        common,
        branches,
        conclusion: if obstruction_branch.is_some() {
            Conclusion::ObstructionFound
        } else {
            Conclusion::NoTheoremObstruction
        },
        obstruction_branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::{catalog_get, Params};
    use crate::scalar::Exact;

    #[test]
    fn example_pair_is_not_obstructed() {
        let none = Params::default();
        let f = catalog_get("example1_f", &none, None).unwrap();
        let g = catalog_get("example1_g", &none, None).unwrap();
        let spec = GridSpec::with_ratio(1, (1, 1), 40).unwrap();
        let r = screen_pair::<Exact>(&f, &g, &spec, Tolerance::Default).unwrap();
        assert_eq!(r.conclusion, Conclusion::NoTheoremObstruction);
        assert!(r.common.iter().all(|c| c.satisfied));
    }

    #[test]
    fn concave_below_convex_is_obstructed() {
        let f = FuncSpec::parse("x1/(1+x1)", 1).unwrap();
        let g = FuncSpec::parse("x1^2+x1", 1).unwrap();
        let spec = GridSpec::with_ratio(1, (1, 4), 16).unwrap();
        let r = screen_pair::<f64>(&f, &g, &spec, Tolerance::Default).unwrap();
        assert_eq!(r.conclusion, Conclusion::ObstructionFound);
        assert_eq!(r.obstruction_branch, Some(Branch::ConcaveF));
        assert!(r
            .common
            .iter()
            .chain(&r.branches[0].hypotheses)
            .all(|c| c.clears_margin));
    }

    #[test]
    fn identity_pair_is_not_obstructed() {
        let f = catalog_get("linear", &Params::default(), Some(1)).unwrap();
        let spec = GridSpec::with_ratio(1, (1, 2), 8).unwrap();
        let r = screen_pair::<Exact>(&f, &f, &spec, Tolerance::Default).unwrap();
        assert_eq!(r.conclusion, Conclusion::NoTheoremObstruction);
    }
}
