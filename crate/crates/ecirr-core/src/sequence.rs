//! Iterated construction of irreducible polynomials under a rational self-map.
//!
//! Starting from an irreducible seed, each step applies the map's polynomial
//! transform.  A run opens in a *branch* phase: the transform is factored and
//! one irreducible factor is kept per step, chosen by a deterministic
//! [`SelectionStrategy`].  Once the kept factor's degree exceeds twice the
//! seed degree, the transform of each subsequent polynomial stays irreducible
//! and the run switches to a *growth* phase that applies the transform
//! directly, multiplying the degree by the map degree every step.
//!
//! A branch attempt can stall: if the kept factor's roots are periodic under
//! the map, its degree never leaves the starting range.  The pick budget
//! (tree depth plus one when the depth is known) bounds how long that can be
//! mistaken for progress; a stalled attempt is abandoned and the run restarts
//! with the next canonical choice for the first factor.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratmap::RationalMap;

/// Degree bound under which [`VerifyPolicy::Auto`] still runs growth-phase
/// irreducibility checks.
pub const VERIFY_AUTO_MAX_DEGREE: usize = 5000;

/// Default cap on branch-phase picks when no tree depth is supplied.
pub const DEFAULT_MAX_BRANCH_STEPS: usize = 12;

/// Rule for picking one factor of the transform during the branch phase.
///
/// Factor lists are in canonical order: degree ascending, then lexicographic
/// on little-endian coefficients with the constant coefficient compared
/// first.  Every strategy is deterministic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// First factor in canonical order.
    SmallestDegree,
    /// First factor of maximal degree.
    LargestDegree,
    /// First factor with degree strictly above the given bound.
    SmallestDegreeAbove(usize),
    /// The k-th factor (0-based) in canonical order.
    KthCanonical(usize),
}

impl Default for SelectionStrategy {
    fn default() -> Self {
        SelectionStrategy::LargestDegree
    }
}

impl SelectionStrategy {
    fn choose(&self, factors: &[Poly]) -> Result<usize> {
        debug_assert!(!factors.is_empty());
        match *self {
            SelectionStrategy::SmallestDegree => Ok(0),
            SelectionStrategy::LargestDegree => {
                let max = factors
                    .iter()
                    .map(|f| f.degree().unwrap_or(0))
                    .max()
                    .expect("factor list is never empty");
                Ok(factors
                    .iter()
                    .position(|f| f.degree() == Some(max))
                    .expect("max degree is attained"))
            }
            SelectionStrategy::SmallestDegreeAbove(t) => factors
                .iter()
                .position(|f| f.degree().is_some_and(|d| d > t))
                .ok_or_else(|| {
                    Error::ExhaustedChoices(format!("no factor of degree above {t}"))
                }),
            SelectionStrategy::KthCanonical(k) => {
                if k < factors.len() {
                    Ok(k)
                } else {
                    Err(Error::ExhaustedChoices(format!(
                        "factor index {k} out of range ({} factors)",
                        factors.len()
                    )))
                }
            }
        }
    }
}

/// When to re-check irreducibility of growth-phase polynomials.
///
/// Branch-phase polynomials come out of a factorization and need no check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyPolicy {
    /// Check while the degree stays below [`VERIFY_AUTO_MAX_DEGREE`].
    Auto,
    Always,
    Never,
}

impl Default for VerifyPolicy {
    fn default() -> Self {
        VerifyPolicy::Auto
    }
}

impl VerifyPolicy {
    fn applies(self, degree: usize) -> bool {
        match self {
            VerifyPolicy::Auto => degree < VERIFY_AUTO_MAX_DEGREE,
            VerifyPolicy::Always => true,
            VerifyPolicy::Never => false,
        }
    }
}

/// Inputs of a sequence run.  `new` fills the defaults; fields are public so
/// callers can override them directly.
#[derive(Clone, Debug)]
pub struct SequenceParams {
    pub map: RationalMap,
    /// Irreducible seed; a non-monic seed is normalized to its monic scalar
    /// multiple, which has the same roots.
    pub f0: Poly,
    /// Number of iteration steps; the run produces `f_0 ..= f_target`.
    pub target: usize,
    pub strategy: SelectionStrategy,
    /// Known depth of the map's preimage trees.  When set, branch attempts
    /// are bounded by `depth + 1` picks, the point past which a healthy run
    /// must have switched to the growth phase.  An attempt that spends the
    /// whole budget below the degree threshold is judged stalled and
    /// restarted with the next first pick, even when it produced `target`
    /// steps; an attempt that reaches `target` with budget to spare is
    /// returned as is.
    pub known_depth: Option<u32>,
    /// Branch-pick cap used when `known_depth` is `None`.
    pub max_branch_steps: usize,
    pub verify: VerifyPolicy,
    /// Seed for factorization-internal randomness; the output does not
    /// depend on it.
    pub seed: u64,
}

impl SequenceParams {
    pub fn new(map: RationalMap, f0: Poly, target: usize) -> Self {
        SequenceParams {
            map,
            f0,
            target,
            strategy: SelectionStrategy::default(),
            known_depth: None,
            max_branch_steps: DEFAULT_MAX_BRANCH_STEPS,
            verify: VerifyPolicy::default(),
            seed: 0,
        }
    }

    fn budget(&self) -> usize {
        match self.known_depth {
            Some(k) => k as usize + 1,
            None => self.max_branch_steps,
        }
    }
}

/// One polynomial of the sequence together with how it was produced.
#[derive(Clone, Debug)]
pub struct IterationStep {
    /// Position in the sequence; step 0 is the seed.
    pub index: usize,
    pub poly: Poly,
    pub degree: usize,
    /// Degrees of the transform's distinct factors, when this step factored.
    pub factor_degrees: Option<Vec<usize>>,
    /// Canonical index of the kept factor, when this step factored.
    pub chosen: Option<usize>,
    /// `Some(true)` when irreducibility was checked or is guaranteed by the
    /// factorization; `None` when the verify policy skipped the check.
    pub verified: Option<bool>,
}

/// Full record of one sequence run.
#[derive(Clone, Debug)]
pub struct SequenceRun {
    pub steps: Vec<IterationStep>,
    /// Index of the first step whose degree exceeds twice the seed degree,
    /// after which the transform is applied without factoring.
    pub switched_at: Option<usize>,
    /// Branch attempts that stalled below the degree threshold and were
    /// abandoned.
    pub restarts: u32,
    /// Canonical indices tried as the first pick, in order; on success the
    /// last entry is the pick the returned sequence uses.
    pub attempted_first_choices: Vec<usize>,
    /// Total factorizations performed, abandoned attempts included.
    pub factorizations: u32,
}

impl SequenceRun {
    pub fn degrees(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.degree).collect()
    }

    pub fn final_poly(&self) -> &Poly {
        &self.steps.last().expect("runs hold at least the seed").poly
    }
}

/// Run the iteration described by `params`.
///
/// Errors: [`Error::IrreducibilityViolation`] if the seed is reducible
/// (step 0) or a verified growth step is (its step index);
/// [`Error::ExhaustedChoices`] if every choice of first factor stalls within
/// the pick budget, or a strategy has no factor to pick.
pub fn run(params: &SequenceParams) -> Result<SequenceRun> {
    let map = &params.map;
    if !map.ctx().same_field(params.f0.ctx()) {
        return Err(Error::ContextMismatch);
    }
    if !params.f0.is_irreducible()? {
        return Err(Error::IrreducibilityViolation(0));
    }
    let f0 = params.f0.make_monic()?;
    let d = f0.degree().expect("irreducible implies positive degree");
    let threshold = 2 * d;

    let mut steps = Vec::with_capacity(params.target + 1);
    steps.push(IterationStep {
        index: 0,
        poly: f0.clone(),
        degree: d,
        factor_degrees: None,
        chosen: None,
        verified: Some(true),
    });
    let mut factorizations = 0u32;
    if params.target == 0 {
        return Ok(SequenceRun {
            steps,
            switched_at: None,
            restarts: 0,
            attempted_first_choices: Vec::new(),
            factorizations,
        });
    }

    // The first transform and its factorization are shared by every attempt.
    let first_factors = map.transform(&f0)?.distinct_factors(params.seed)?;
    factorizations += 1;
    let first_degrees: Vec<usize> = first_factors
        .iter()
        .map(|f| f.degree().unwrap_or(0))
        .collect();

    // First-pick order: the strategy's own choice, then the remaining
    // factors canonically.
    let preferred = params.strategy.choose(&first_factors)?;
    let mut order = vec![preferred];
    order.extend((0..first_factors.len()).filter(|&i| i != preferred));

    let budget = params.budget();
    let mut restarts = 0u32;
    let mut attempted = Vec::new();

    for &first_idx in &order {
        attempted.push(first_idx);
        let mut cur = first_factors[first_idx].clone();
        let mut attempt = vec![IterationStep {
            index: 1,
            poly: cur.clone(),
            degree: cur.degree().unwrap_or(0),
            factor_degrees: Some(first_degrees.clone()),
            chosen: Some(first_idx),
            verified: Some(true),
        }];
        let mut picks = 1usize;
        let mut switched_at = (attempt[0].degree > threshold).then_some(1);

        // Branch phase: factor the transform, keep one factor per step.
        while attempt.len() < params.target && switched_at.is_none() && picks < budget {
            let factors = map.transform(&cur)?.distinct_factors(params.seed)?;
            factorizations += 1;
            let degrees: Vec<usize> = factors.iter().map(|f| f.degree().unwrap_or(0)).collect();
            let idx = params.strategy.choose(&factors)?;
            cur = factors[idx].clone();
            picks += 1;
            let deg = cur.degree().unwrap_or(0);
            let index = attempt.len() + 1;
            attempt.push(IterationStep {
                index,
                poly: cur.clone(),
                degree: deg,
                factor_degrees: Some(degrees),
                chosen: Some(idx),
                verified: Some(true),
            });
            if deg > threshold {
                switched_at = Some(index);
            }
        }

        if switched_at.is_none() && picks == budget {
            // Budget spent below the threshold: the kept roots are periodic
            // under the map and the sequence would stall forever.  Abandon
            // this first pick and try the next, even if the requested number
            // of steps was produced.
            restarts += 1;
            continue;
        }

        // Growth phase: apply the transform directly.
        while attempt.len() < params.target {
            let next = map.transform(&cur)?;
            let deg = next.degree().unwrap_or(0);
            let index = attempt.len() + 1;
            let verified = if params.verify.applies(deg) {
                if !next.is_irreducible()? {
                    return Err(Error::IrreducibilityViolation(index));
                }
                Some(true)
            } else {
                None
            };
            cur = next;
            attempt.push(IterationStep {
                index,
                poly: cur.clone(),
                degree: deg,
                factor_degrees: None,
                chosen: None,
                verified,
            });
        }

        steps.extend(attempt);
        return Ok(SequenceRun {
            steps,
            switched_at,
            restarts,
            attempted_first_choices: attempted,
            factorizations,
        });
    }

    Err(Error::ExhaustedChoices(format!(
        "every first pick stalled at degree <= {threshold} within {budget} picks"
    )))
}
