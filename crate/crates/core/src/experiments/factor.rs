//! Bounded-query factorization: a functional asking at most `ℓ` queries is
//! a function of `ℓ` fixed coordinates, and its run can be replayed on names
//! of those coordinates alone.

use serde::{Deserialize, Serialize};

use crate::encoding::Word;
use crate::machine::{
    run, Functional, OracleError, QueryTrace, Run, RunFailure, SequenceOracle,
};
use crate::names::{SequenceName, SequenceSpec};

/// A name of a single real number: precision `j` to a word.
pub trait RealName: Sync {
    fn respond(&self, j: u32) -> Word;
}

/// Coordinate `index` of a sequence name, viewed as a name of one real.
#[derive(Debug, Clone)]
pub struct Coordinate {
    pub name: SequenceName,
    pub index: u64,
}

impl RealName for Coordinate {
    fn respond(&self, j: u32) -> Word {
        self.name.answer(self.index, j)
    }
}

/// Presents `ℓ` real arguments as a sequence oracle that is only defined on
/// the factor coordinates; any other query is an error.
struct ProjectedName<'a> {
    coords: &'a [u64],
    args: &'a [&'a dyn RealName],
}

impl SequenceOracle for ProjectedName<'_> {
    fn label(&self) -> String {
        format!("args{:?}", self.coords)
    }

    fn respond(&self, i: u64, j: u32) -> Result<Word, OracleError> {
        let t = self
            .coords
            .iter()
            .position(|&c| c == i)
            .ok_or(OracleError::OutsideFactor(i))?;
        Ok(self.args[t].respond(j))
    }
}

/// `f = φ ∘ (x ↦ (x_{i_1}, ..., x_{i_ℓ}))`, with `φ` realized by replaying `f`.
pub struct FiniteFactorization<'f> {
    pub functional: &'f dyn Functional,
    pub coordinates: Vec<u64>,
    pub ell: usize,
}

impl FiniteFactorization<'_> {
    /// `φ(args)` at precision `n`; the `t`-th argument answers queries to `i_t`.
    pub fn eval(&self, args: &[&dyn RealName], n: u32) -> Result<Run, RunFailure> {
        assert_eq!(args.len(), self.coordinates.len(), "arity mismatch");
        let oracle = ProjectedName {
            coords: &self.coordinates,
            args,
        };
        run(self.functional, &oracle, n)
    }

    /// The arguments `φ` receives for the point named by `name`.
    pub fn project(&self, name: &SequenceName) -> Vec<Coordinate> {
        self.coordinates
            .iter()
            .map(|&index| Coordinate {
                name: name.clone(),
                index,
            })
            .collect()
    }

    /// Replays `f` on the projection of `name` and compares with a direct run.
    pub fn replay(&self, name: &SequenceName, n: u32) -> Result<ReplayCheck, RunFailure> {
        let direct = run(self.functional, name, n)?;
        let args = self.project(name);
        let refs: Vec<&dyn RealName> = args.iter().map(|a| a as &dyn RealName).collect();
        let replayed = self.eval(&refs, n)?;
        let same_queries = direct.trace.queries == replayed.trace.queries;
        Ok(ReplayCheck {
            spec: name.label(),
            identical: same_queries && direct.output == replayed.output,
            original: direct.output.to_string(),
            replayed: replayed.output.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayCheck {
    pub spec: String,
    pub identical: bool,
    pub original: String,
    pub replayed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub functional: String,
    pub ell: usize,
    pub n: u32,
    pub coordinates: Vec<u64>,
    pub samples: usize,
    /// Replays whose output or query stream differed from the direct run.
    pub mismatches: Vec<ReplayCheck>,
}

impl FactorReport {
    pub fn equivalent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Two runs that should have touched the same coordinates but did not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CordMismatch {
    pub spec_a: String,
    pub spec_b: String,
    pub trace_a: QueryTrace,
    pub trace_b: QueryTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("functional `{0}` declares no query bound and none was given")]
    MissingQueryBound(String),
    #[error("no sample specs given")]
    NoSamples,
    #[error("cords differ between `{}` (n={}) and `{}` (n={})", .0.spec_a, .0.trace_a.n, .0.spec_b, .0.trace_b.n)]
    CordMismatch(Box<CordMismatch>),
    #[error("cord {cord:?} has more than {ell} coordinates")]
    BoundExceeded { ell: usize, cord: Vec<u64> },
    #[error(transparent)]
    Run(#[from] RunFailure),
}

/// Extracts the coordinates `i_1..i_ℓ` from a probe run on the first sample,
/// checks that every sample at every precision `0..=n` touches exactly those,
/// and verifies that replaying through the factorization is bit-identical.
pub fn factor<'f>(
    f: &'f dyn Functional,
    ell: Option<usize>,
    samples: &[SequenceSpec],
    n: u32,
) -> Result<(FiniteFactorization<'f>, FactorReport), FactorError> {
    let ell = ell
        .or_else(|| f.query_bound())
        .ok_or_else(|| FactorError::MissingQueryBound(f.id()))?;
    let names: Vec<SequenceName> = samples.iter().cloned().map(SequenceName::standard).collect();
    let probe_name = names.first().ok_or(FactorError::NoSamples)?;
    let probe = run(f, probe_name, n)?;
    let probe_cord = probe.trace.cord_set();

    // Across inputs at the target precision first, then across precisions.
    let checks = names
        .iter()
        .map(|name| (name, n))
        .chain(names.iter().flat_map(|name| (0..n).map(move |m| (name, m))));
    for (name, m) in checks {
        let r = run(f, name, m)?;
        if r.trace.cord_set() != probe_cord {
            return Err(FactorError::CordMismatch(Box::new(CordMismatch {
                spec_a: probe_name.label(),
                spec_b: name.label(),
                trace_a: probe.trace,
                trace_b: r.trace,
            })));
        }
    }

    let coordinates = probe.trace.cord_in_order();
    if coordinates.len() > ell {
        return Err(FactorError::BoundExceeded {
            ell,
            cord: coordinates,
        });
    }
    let fac = FiniteFactorization {
        functional: f,
        coordinates,
        ell,
    };
    let mut mismatches = Vec::new();
    for name in &names {
        let check = fac.replay(name, n)?;
        if !check.identical {
            mismatches.push(check);
        }
    }
    let report = FactorReport {
        functional: f.id(),
        ell,
        n,
        coordinates: fac.coordinates.clone(),
        samples: names.len(),
        mismatches,
    };
    Ok((fac, report))
}
