use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use eigensum::lab::sampling::{random_column_orthogonal, random_scaled_orthogonal, random_transform, LOG_SPREAD};
use eigensum::lab::{
    box_identity_check, dn_batch, hsnorm_check, momentratio_body_check, momentratio_check, naive_unbounded_check,
    regular_check, robin_batch, robin_normalized_check, stretch_check, torus_check, Domain, MomentShape,
};
use eigensum::{BoundaryCondition, SquareMatrix, VerificationReport};

use crate::error::CliError;
use crate::spec::{sides_of, Shape};

pub const THEOREMS: [&str; 10] = [
    "thm-DN",
    "cor-stretch",
    "cor-regular",
    "thm-robin",
    "cor-robin",
    "prop-torus",
    "lem-hsnorm",
    "lem-momentratio",
    "box-12pi2",
    "naive-unbounded",
];

pub fn check_theorem(id: &str) -> Result<(), CliError> {
    if THEOREMS.contains(&id) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown theorem {id:?}; available: {}", THEOREMS.join(", "))))
    }
}

/// Parameters shared by single cases and sweeps.
#[derive(Clone, Debug)]
pub struct CaseParams {
    pub n: Option<usize>,
    pub bc: Option<BoundaryCondition>,
    pub level: Option<usize>,
}

impl CaseParams {
    fn n(&self) -> usize {
        self.n.unwrap_or(5)
    }

    fn dirichlet_or_neumann(&self) -> Result<BoundaryCondition, CliError> {
        match self.bc.unwrap_or(BoundaryCondition::Dirichlet) {
            BoundaryCondition::Robin { .. } => Err(CliError::Usage("this check takes dirichlet or neumann".into())),
            bc => Ok(bc),
        }
    }

    fn sigma(&self) -> Result<f64, CliError> {
        match self.bc {
            Some(BoundaryCondition::Robin { sigma }) => Ok(sigma),
            None => Ok(1.0),
            Some(_) => Err(CliError::Usage("this check takes bc = robin (default sigma 1)".into())),
        }
    }

    fn no_bc(&self) -> Result<(), CliError> {
        match self.bc {
            Some(_) => Err(CliError::Usage("this check takes no boundary condition".into())),
            None => Ok(()),
        }
    }
}

fn reference(shape: &Shape, id: &str) -> Result<(Domain, SquareMatrix), CliError> {
    match shape {
        Shape::Reference { domain, t } => Ok((*domain, t.clone())),
        _ => Err(CliError::Usage(format!("{id} needs a box, simplex, regular polygon, ball or equilateral triangle"))),
    }
}

/// One check on the domain from a spec.
pub fn single(id: &str, shape: &Shape, p: &CaseParams) -> Result<Vec<VerificationReport>, CliError> {
    let report = match id {
        "thm-DN" => {
            let (domain, t) = reference(shape, id)?;
            dn_batch(domain, &[t], &[p.n()], p.dirichlet_or_neumann()?, p.level)?.remove(0)
        }
        "cor-stretch" => {
            let (domain, t) = reference(shape, id)?;
            let d = t.dim();
            let off_diagonal = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).any(|(i, j)| i != j && t[(i, j)] != 0.0);
            if off_diagonal {
                return Err(CliError::Usage("cor-stretch needs a diagonal transform".into()));
            }
            let factors: Vec<f64> = (0..d).map(|i| t[(i, i)]).collect();
            stretch_check(domain, &factors, p.n(), p.dirichlet_or_neumann()?, p.level)?
        }
        "cor-regular" => {
            let (domain, t) = reference(shape, id)?;
            regular_check(domain, &t, p.n(), p.dirichlet_or_neumann()?, p.level)?
        }
        "thm-robin" => {
            let (domain, t) = reference(shape, id)?;
            robin_batch(domain, &[t], &[p.n()], p.sigma()?, p.level)?.remove(0)
        }
        "cor-robin" => {
            let (domain, t) = reference(shape, id)?;
            robin_normalized_check(domain, &t, p.n(), p.sigma()?, p.level)?
        }
        "prop-torus" => {
            p.no_bc()?;
            match shape {
                Shape::Torus { basis } => torus_check(basis, p.n())?,
                _ => return Err(CliError::Usage("prop-torus needs kind torus".into())),
            }
        }
        "lem-hsnorm" => {
            let (domain, t) = reference(shape, id)?;
            hsnorm_check(domain, &t)?
        }
        "lem-momentratio" => match shape {
            Shape::Reference { domain, t } => momentratio_body_check(&domain.name(), &shape.body()?, Some(t))?,
            Shape::Free { name, body } => momentratio_body_check(name, body, None)?,
            Shape::Torus { .. } => return Err(CliError::Usage("lem-momentratio needs a planar body".into())),
        },
        "box-12pi2" => {
            let sides = sides_of(shape).ok_or_else(|| CliError::Usage("box-12pi2 needs an axis-aligned box".into()))?;
            box_identity_check(&sides)?
        }
        "naive-unbounded" => return Err(CliError::Usage("naive-unbounded takes no domain; use --trials".into())),
        _ => unreachable!("theorem ids are checked first"),
    };
    Ok(vec![report])
}

fn uniform_log<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-LOG_SPREAD..=LOG_SPREAD).exp()
}

/// `trials` random cases drawn from `seed`. The inputs are drawn in order
/// from one generator, then evaluated concurrently; output keeps input order.
pub fn sweep(id: &str, trials: usize, seed: u64, dim: Option<usize>, p: &CaseParams) -> Result<Vec<VerificationReport>, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planar = matches!(id, "prop-torus" | "lem-momentratio");
    let d = dim.unwrap_or(if planar { 2 } else { 3 });
    let cube = Domain::Hypercube { d };
    let mut reports = match id {
        "thm-DN" | "thm-robin" => {
            let ts: Vec<SquareMatrix> = (0..trials).map(|_| random_column_orthogonal(d, LOG_SPREAD, false, &mut rng).matrix).collect();
            if id == "thm-DN" {
                dn_batch(cube, &ts, &[p.n()], p.dirichlet_or_neumann()?, p.level)?
            } else {
                robin_batch(cube, &ts, &[p.n()], p.sigma()?, p.level)?
            }
        }
        "cor-stretch" => {
            let bc = p.dirichlet_or_neumann()?;
            let fs: Vec<Vec<f64>> = (0..trials).map(|_| (0..d).map(|_| rng.random_range(1.0..=2.0)).collect()).collect();
            par(&fs, |f| stretch_check(cube, f, p.n(), bc, p.level))?
        }
        "cor-regular" => {
            let bc = p.dirichlet_or_neumann()?;
            let ts: Vec<SquareMatrix> = (0..trials).map(|_| random_column_orthogonal(d, LOG_SPREAD, false, &mut rng).matrix).collect();
            par(&ts, |t| regular_check(cube, t, p.n(), bc, p.level))?
        }
        "cor-robin" => {
            let sigma = p.sigma()?;
            let ts: Vec<SquareMatrix> = (0..trials).map(|_| random_column_orthogonal(d, LOG_SPREAD, true, &mut rng).matrix).collect();
            par(&ts, |t| robin_normalized_check(cube, t, p.n(), sigma, p.level))?
        }
        "prop-torus" => {
            p.no_bc()?;
            // every fourth lattice is a scaled rotation of the cubical one
            let ts: Vec<SquareMatrix> = (0..trials)
                .map(|i| {
                    if i % 4 == 0 {
                        random_scaled_orthogonal(d, LOG_SPREAD, &mut rng).matrix
                    } else {
                        random_transform(d, LOG_SPREAD, false, &mut rng).matrix
                    }
                })
                .collect();
            par(&ts, |t| torus_check(t, p.n()))?
        }
        "lem-hsnorm" => {
            let ts: Vec<SquareMatrix> = (0..trials).map(|_| random_transform(d, LOG_SPREAD, false, &mut rng).matrix).collect();
            par(&ts, |t| hsnorm_check(cube, t))?
        }
        "lem-momentratio" => {
            if d != 2 {
                return Err(CliError::Usage("lem-momentratio is planar".into()));
            }
            let shapes = [MomentShape::Triangle, MomentShape::Parallelogram, MomentShape::Ellipse];
            let cases: Vec<(MomentShape, SquareMatrix)> = (0..trials)
                .map(|i| (shapes[i % 3], random_transform(2, LOG_SPREAD, false, &mut rng).matrix))
                .collect();
            par(&cases, |(s, t)| momentratio_check(*s, t))?
        }
        "box-12pi2" => {
            let sides: Vec<Vec<f64>> = (0..trials).map(|_| (0..d).map(|_| uniform_log(&mut rng)).collect()).collect();
            par(&sides, |s| box_identity_check(s))?
        }
        "naive-unbounded" => {
            let eps: Vec<Vec<f64>> = (0..trials)
                .map(|_| {
                    let mut e: Vec<f64> = (0..4).map(|_| 1.0 - rng.random_range(0.0..1.0)).collect();
                    e.sort_by(|a, b| b.total_cmp(a));
                    e
                })
                .collect();
            let nested: Vec<Vec<VerificationReport>> = eps.par_iter().map(|e| naive_unbounded_check(e)).collect::<Result<_, _>>()?;
            nested.into_iter().flatten().collect()
        }
        _ => unreachable!("theorem ids are checked first"),
    };
    for r in &mut reports {
        r.inputs.seed = Some(seed);
    }
    Ok(reports)
}

fn par<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> eigensum::Result<VerificationReport> + Sync + Send,
) -> Result<Vec<VerificationReport>, CliError> {
    Ok(items.par_iter().map(f).collect::<Result<_, _>>()?)
}

#[derive(Serialize)]
struct Summary<'a> {
    theorem: &'a str,
    cases: usize,
    passed: usize,
    failed: usize,
    equality_cases: usize,
    near_equality_cases: usize,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: Summary<'a>,
}

pub fn summary_line(id: &str, reports: &[VerificationReport]) -> String {
    let passed = reports.iter().filter(|r| r.pass).count();
    let line = SummaryLine {
        summary: Summary {
            theorem: id,
            cases: reports.len(),
            passed,
            failed: reports.len() - passed,
            equality_cases: reports.iter().filter(|r| r.equality_case == Some(true)).count(),
            near_equality_cases: reports.iter().filter(|r| r.near_equality).count(),
        },
    };
    serde_json::to_string(&line).expect("summary serialises")
}
