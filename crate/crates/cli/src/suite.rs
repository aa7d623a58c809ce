use std::collections::BTreeMap;
use std::fmt;

use git_height::bounds::{
    convex_lemma_min, ell, epsilon_inverse_w2, epsilon_map, epsilon_norm_check, explicit_lower_bound, Variant,
};
use git_height::conj_git::{
    complexify, instability_conj, is_minimal_arch, is_semistable_conj, moment_map_conj, orbit_sampling_bound,
    quotient_height_conj, skew_hermitian_basis, Norm,
};
use git_height::heights::{naive_height, ProjectivePoint};
use git_height::torus_git::{destabilizing_1ps, instability, is_semistable, quotient_height, Minimizer, TorusAction};
use git_height::{LogValue, MatrixQ, Place, Prime, Rational};

use crate::error::CliError;
use crate::Config;

#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    /// Finite part compared exactly, archimedean part within the tolerance.
    Log(LogValue),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Expected {
    fn matches(&self, computed: &Expected, tol: f64) -> bool {
        match (self, computed) {
            (Expected::Log(a), Expected::Log(b)) => {
                a.is_neg_infinity() == b.is_neg_infinity()
                    && a.finite_part() == b.finite_part()
                    && (a.arch_part() - b.arch_part()).abs() <= tol
            }
            (Expected::Float(a), Expected::Float(b)) => (a - b).abs() <= tol,
            (Expected::Bool(a), Expected::Bool(b)) => a == b,
            (Expected::Text(a), Expected::Text(b)) => a == b,
            _ => false,
        }
    }

    fn corrupt(self) -> Expected {
        match self {
            Expected::Log(v) => Expected::Log(v + LogValue::log_prime(prime(2), Rational::from_integer(1.into()))),
            Expected::Float(x) => Expected::Float(x + 1.0),
            Expected::Bool(b) => Expected::Bool(!b),
            Expected::Text(t) => Expected::Text(format!("{t}?")),
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Log(v) => write!(f, "{v}"),
            Expected::Float(x) => write!(f, "{x:.12}"),
            Expected::Bool(b) => write!(f, "{b}"),
            Expected::Text(t) => f.write_str(t),
        }
    }
}

pub struct Check {
    pub name: &'static str,
    pub expected: Expected,
    pub computed: Result<Expected, CliError>,
}

impl Check {
    pub fn passed(&self, tol: f64) -> bool {
        self.computed.as_ref().is_ok_and(|c| self.expected.matches(c, tol))
    }
}

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("literal prime")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn m(rows: &[&[i64]]) -> MatrixQ {
    MatrixQ::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("rectangular literal")
}

fn log(p: u64, q: Rational) -> LogValue {
    LogValue::log_prime(prime(p), q)
}

fn torus_example() -> (TorusAction, ProjectivePoint) {
    (
        TorusAction::rank_one(&[-2, 1, 4]).expect("valid weights"),
        ProjectivePoint::from_i64(&[2, 2, 1]).expect("nonzero point"),
    )
}

fn ln(x: f64) -> f64 {
    x.ln()
}

type Computation = Box<dyn Fn(&Config) -> Result<Expected, CliError>>;

fn cases() -> Vec<(&'static str, Expected, Computation)> {
    let mut c: Vec<(&'static str, Expected, Computation)> = Vec::new();
    c.push((
        "naive-height-2:2:1",
        Expected::Log(log(3, q(1, 1))),
        Box::new(|_| Ok(Expected::Log(naive_height(&torus_example().1)?))),
    ));
    c.push((
        "torus-semistable",
        Expected::Bool(true),
        Box::new(|_| {
            let (a, x) = torus_example();
            Ok(Expected::Bool(is_semistable(&a, &x)?))
        }),
    ));
    c.push((
        "torus-unstable-1:0",
        Expected::Bool(false),
        Box::new(|_| {
            let a = TorusAction::rank_one(&[-1, 1])?;
            Ok(Expected::Bool(is_semistable(&a, &ProjectivePoint::from_i64(&[1, 0])?)?))
        }),
    ));
    c.push((
        "torus-no-destabilizing-1ps",
        Expected::Bool(true),
        Box::new(|_| {
            let (a, x) = torus_example();
            Ok(Expected::Bool(destabilizing_1ps(&a, &x)?.is_none()))
        }),
    ));
    c.push((
        "torus-iota-2",
        Expected::Log(log(2, q(-2, 3))),
        Box::new(|cfg| {
            let (a, x) = torus_example();
            Ok(Expected::Log(instability(&a, &x, Place::Finite(prime(2)), cfg.arch_tol)?.value))
        }),
    ));
    c.push((
        "torus-iota-2-minimizer",
        Expected::Text("-1/6".into()),
        Box::new(|cfg| {
            let (a, x) = torus_example();
            let text = match instability(&a, &x, Place::Finite(prime(2)), cfg.arch_tol)?.minimizer {
                Minimizer::Exact(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                other => format!("{other:?}"),
            };
            Ok(Expected::Text(text))
        }),
    ));
    for (name, p) in [("torus-iota-3", 3), ("torus-iota-5", 5), ("torus-iota-7", 7)] {
        c.push((
            name,
            Expected::Log(LogValue::zero()),
            Box::new(move |cfg| {
                let (a, x) = torus_example();
                Ok(Expected::Log(instability(&a, &x, Place::Finite(prime(p)), cfg.arch_tol)?.value))
            }),
        ));
    }
    c.push((
        "torus-iota-inf",
        Expected::Float(0.0),
        Box::new(|cfg| {
            let (a, x) = torus_example();
            Ok(Expected::Float(instability(&a, &x, Place::Archimedean, cfg.arch_tol)?.value.to_f64()))
        }),
    ));
    c.push((
        "torus-quotient-height",
        Expected::Log(LogValue::from_parts(BTreeMap::from([(2, q(-2, 3))]), ln(3.0))),
        Box::new(|cfg| {
            let (a, x) = torus_example();
            Ok(Expected::Log(quotient_height(&a, &x, cfg.arch_tol)?))
        }),
    ));
    c.push((
        "conj-unipotent-semistable",
        Expected::Bool(true),
        Box::new(|_| Ok(Expected::Bool(is_semistable_conj(&m(&[&[1, 1], &[0, 1]]))?))),
    ));
    c.push((
        "conj-diag-0-0-1-semistable",
        Expected::Bool(true),
        Box::new(|_| Ok(Expected::Bool(is_semistable_conj(&m(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]))?))),
    ));
    c.push((
        "conj-unipotent-quotient-height",
        Expected::Float(0.5 * ln(2.0)),
        Box::new(|cfg| Ok(Expected::Float(quotient_height_conj(&m(&[&[1, 1], &[0, 1]]), cfg.arch_tol)?.to_f64()))),
    ));
    c.push((
        "conj-diag-2-3-quotient-height",
        Expected::Log(LogValue::from_arch(0.5 * ln(13.0))),
        Box::new(|cfg| Ok(Expected::Log(quotient_height_conj(&m(&[&[2, 0], &[0, 3]]), cfg.arch_tol)?))),
    ));
    c.push((
        "conj-diag-2-3-iota-2-sup",
        Expected::Log(LogValue::zero()),
        Box::new(|cfg| {
            let r = instability_conj(&m(&[&[2, 0], &[0, 3]]), Place::Finite(prime(2)), Norm::Sup, cfg.arch_tol)?;
            Ok(Expected::Log(r.value))
        }),
    ));
    c.push((
        "conj-diag-1-2-minimal",
        Expected::Bool(true),
        Box::new(|_| Ok(Expected::Bool(is_minimal_arch(&m(&[&[1, 0], &[0, 2]]))?.minimal))),
    ));
    c.push((
        "conj-normal-moment-map",
        Expected::Float(0.0),
        Box::new(|_| {
            let phi = complexify::<f64>(&m(&[&[1, 0], &[0, 2]]));
            let mut worst: f64 = 0.0;
            for a in skew_hermitian_basis::<f64>(2) {
                worst = worst.max(moment_map_conj(&phi, &a)?.abs());
            }
            Ok(Expected::Float(worst))
        }),
    ));
    c.push((
        "conj-unipotent-orbit-sampling",
        Expected::Bool(true),
        Box::new(|cfg| {
            let b = orbit_sampling_bound(&m(&[&[1, 1], &[0, 1]]), 100, cfg.seed)?;
            Ok(Expected::Bool(b >= 0.5 * ln(2.0) - cfg.compare_tol && (b - 0.5 * ln(3.0)).abs() <= cfg.compare_tol))
        }),
    ));
    c.push((
        "ell-asymptotics-10000",
        Expected::Bool(true),
        Box::new(|_| Ok(Expected::Bool((ell(10_000)? - (ln(10_000.0) - 1.0)).abs() < 0.01))),
    ));
    c.push((
        "lower-bound-b-zero",
        Expected::Log(LogValue::zero()),
        Box::new(|_| {
            let slopes = [log(2, q(1, 1)), LogValue::from_arch(0.25)];
            Ok(Expected::Log(explicit_lower_bound(&[0, 0], &slopes, &[4, 2])?))
        }),
    ));
    c.push((
        "epsilon-2-inverse",
        Expected::Bool(true),
        Box::new(|_| {
            let prod = epsilon_map(2)?.to_dense().mul(&epsilon_inverse_w2());
            Ok(Expected::Bool(prod == MatrixQ::identity(4)))
        }),
    ));
    c.push((
        "epsilon-2-isometry",
        Expected::Float(1.0),
        Box::new(|_| Ok(Expected::Float(epsilon_norm_check(2)?.norm))),
    ));
    for (name, w) in [("epsilon-2-bound", 2), ("epsilon-3-bound", 3), ("epsilon-4-bound", 4)] {
        c.push((name, Expected::Bool(true), Box::new(move |_| Ok(Expected::Bool(epsilon_norm_check(w)?.ok)))));
    }
    for (name, variant, value) in
        [("convex-log3", Variant::Log3, ln(3.0)), ("convex-log-sqrt3", Variant::LogSqrt3, 0.5 * ln(3.0))]
    {
        c.push((
            name,
            Expected::Float(value),
            Box::new(move |_| Ok(Expected::Float(convex_lemma_min::<f64>(variant, 1e-10).value))),
        ));
    }
    c.push((
        "convex-minimizer-at-zero",
        Expected::Bool(true),
        Box::new(|_| {
            let tol = 1e-10;
            let ok =
                [Variant::Log3, Variant::LogSqrt3].iter().all(|&v| convex_lemma_min::<f64>(v, tol).argmin.abs() < tol);
            Ok(Expected::Bool(ok))
        }),
    ));
    c
}

pub fn names() -> Vec<&'static str> {
    cases().into_iter().map(|(n, _, _)| n).collect()
}

/// Runs every check; `corrupt` names checks whose expected value is perturbed.
pub fn run(cfg: &Config, corrupt: &[String]) -> Result<Vec<Check>, CliError> {
    let all = cases();
    if let Some(unknown) = corrupt.iter().find(|n| !all.iter().any(|(name, _, _)| name == n)) {
        return Err(CliError::Parse(format!("no check named `{unknown}`")));
    }
    Ok(all
        .into_iter()
        .map(|(name, expected, f)| {
            let expected = if corrupt.iter().any(|n| n == name) { expected.corrupt() } else { expected };
            Check { name, expected, computed: f(cfg) }
        })
        .collect())
}
