//! The acceptance suite behind `compactify verify`.
//!
//! Each criterion is a self-contained check returning an [`Outcome`] whose
//! serialized form depends only on the seed. Wall-clock times are returned
//! separately so reports stay reproducible.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use compactify_core::{
    build_compactification, chebyshev_expand, check_ball_cylinder_inclusions, check_extendability,
    compare, enlarge, equivalence_check, extend_by_projection, product_distance, tail_bound,
    BuildParams, CompactificationModel, Comparison, CoordinateMap, FunctionDescriptor as F,
    FunctionFamily, ProductPoint, ProductSpace, TailSide, Verdict, BOND_TOLERANCE, DEFAULT_DELTAS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chain;
use crate::report::Timing;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Runtime budget in seconds, when one is pinned.
    pub budget_s: Option<f64>,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion {
        id: 1,
        name: "chebyshev identity",
        budget_s: Some(1.0),
    },
    Criterion {
        id: 2,
        name: "product metric axioms",
        budget_s: Some(2.0),
    },
    Criterion {
        id: 3,
        name: "truncation bound",
        budget_s: Some(1.0),
    },
    Criterion {
        id: 4,
        name: "one-point and two-point remainders",
        budget_s: Some(10.0),
    },
    Criterion {
        id: 5,
        name: "cos does not extend",
        budget_s: Some(10.0),
    },
    Criterion {
        id: 6,
        name: "gamma remainder",
        budget_s: Some(30.0),
    },
    Criterion {
        id: 7,
        name: "projection extension",
        budget_s: None,
    },
    Criterion {
        id: 8,
        name: "comparison lattice",
        budget_s: Some(30.0),
    },
    Criterion {
        id: 9,
        name: "strict enlargement",
        budget_s: Some(20.0),
    },
    Criterion {
        id: 10,
        name: "inverse limit",
        budget_s: Some(60.0),
    },
    Criterion {
        id: 11,
        name: "determinism",
        budget_s: Some(180.0),
    },
];

pub fn criterion(id: u8) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub metrics: Value,
    pub failures: Vec<String>,
}

/// Collects failed checks.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }
}

fn outcome(id: u8, checks: Checks, metrics: Value) -> Outcome {
    Outcome {
        id,
        name: criterion(id).map_or("", |c| c.name).to_owned(),
        passed: checks.0.is_empty(),
        metrics,
        failures: checks.0,
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn cube_point(rng: &mut ChaCha8Rng, dim: usize) -> ProductPoint {
    ProductPoint::new((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

fn model(fs: Vec<F>) -> compactify_core::Result<CompactificationModel> {
    build_compactification(FunctionFamily::new(fs)?, BuildParams::default())
}

fn tanh() -> F {
    F::tanh(1.0, 0.0)
}

fn cos(a: f64) -> F {
    F::cos(a, 0.0)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    product_distance(
        &ProductPoint::new(a.to_vec()),
        &ProductPoint::new(b.to_vec()),
    )
    .unwrap_or(f64::INFINITY)
}

/// Runs one criterion. Criterion 11 reruns 1 to 10 and compares.
pub fn run(id: u8, seed: u64) -> Outcome {
    let result = match id {
        1 => Ok(chebyshev(seed)),
        2 => Ok(metric_axioms(seed)),
        3 => Ok(truncation(seed)),
        4 => classic_remainders(),
        5 => cos_fails(),
        6 => gamma_remainder(),
        7 => projections(),
        8 => lattice(),
        9 => strict_enlargement(),
        10 => inverse_limit(),
        11 => Ok(determinism(seed, None)),
        _ => {
            let mut c = Checks::default();
            c.check(false, || format!("unknown criterion {id}"));
            return outcome(id, c, Value::Null);
        }
    };
    result.unwrap_or_else(|e| {
        let mut c = Checks::default();
        c.check(false, || format!("error: {e}"));
        outcome(id, c, Value::Null)
    })
}

fn chebyshev(_seed: u64) -> Outcome {
    let mut c = Checks::default();
    let mut sup = Vec::new();
    for n in 1..=12u32 {
        let f = chebyshev_expand(n).expect("n >= 1");
        let worst = (0..10_000)
            .map(|i| -50.0 + 100.0 * i as f64 / 9_999.0)
            .map(|x: f64| (f.evaluate(x) - (n as f64 * x).cos()).abs())
            .fold(0.0, f64::max);
        c.check(worst <= 1e-9, || format!("n={n}: sup error {worst:e}"));
        sup.push(worst);
    }
    outcome(1, c, json!({ "grid_points": 10_000, "sup_error": sup }))
}

fn metric_axioms(seed: u64) -> Outcome {
    let mut c = Checks::default();
    let mut r = rng(seed, 2);
    let (mut asym, mut identity, mut triangle) = (0usize, 0usize, 0usize);
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut pairs = Vec::with_capacity(30_000);
    for i in 0..10_000 {
        let x = cube_point(&mut r, 5);
        // Every 50th triple repeats a point to exercise the zero case.
        let y = if i % 50 == 0 {
            x.clone()
        } else {
            cube_point(&mut r, 5)
        };
        let z = cube_point(&mut r, 5);
        let d =
            |a: &ProductPoint, b: &ProductPoint| product_distance(a, b).expect("same dimension");
        let (dxy, dyx, dyz, dxz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        if !(dxy >= 0.0) || dxy != dyx {
            asym += 1;
        }
        if d(&x, &x) != 0.0 || (dxy == 0.0) != (x == y) {
            identity += 1;
        }
        excess = excess.max(dxz - dxy - dyz);
        if dxz > dxy + dyz + 1e-12 {
            triangle += 1;
        }
        let scale = [0.3, 0.03, 0.003][i % 3];
        let near = ProductPoint::new(
            x.coords()
                .iter()
                .map(|v| (v + scale * r.random_range(-1.0..1.0)).clamp(-1.0, 1.0))
                .collect(),
        );
        pairs.push((x.clone(), near));
        pairs.push((x, y));
        pairs.push((z.clone(), z));
    }
    c.check(asym == 0, || format!("{asym} symmetry or sign violations"));
    c.check(identity == 0, || format!("{identity} identity violations"));
    c.check(triangle == 0, || format!("{triangle} triangle violations"));

    let space = ProductSpace::cube(5);
    let mut inclusions = Vec::new();
    for radius in [0.05, 0.3, 1.0] {
        match check_ball_cylinder_inclusions(&space, &pairs, radius) {
            Ok(rep) => {
                c.check(rep.violations.is_empty(), || {
                    format!("r={radius}: {} inclusion violations", rep.violations.len())
                });
                c.check(
                    rep.projection_premises > 0 && rep.cylinder_premises > 0,
                    || format!("r={radius}: a premise was never exercised"),
                );
                inclusions.push(json!({
                    "radius": radius,
                    "k": rep.k,
                    "pairs": rep.pairs_checked,
                    "projection_premises": rep.projection_premises,
                    "cylinder_premises": rep.cylinder_premises,
                    "violations": rep.violations.len(),
                }));
            }
            Err(e) => c.check(false, || format!("r={radius}: {e}")),
        }
    }
    outcome(
        2,
        c,
        json!({
            "triples": 10_000,
            "symmetry_violations": asym,
            "identity_violations": identity,
            "triangle_violations": triangle,
            "max_triangle_excess": excess,
            "inclusions": inclusions,
        }),
    )
}

fn truncation(seed: u64) -> Outcome {
    let mut c = Checks::default();
    let mut r = rng(seed, 3);
    let mut worst = [0.0f64; 21];
    for _ in 0..10_000 {
        let x = cube_point(&mut r, 20);
        let y = cube_point(&mut r, 20);
        let full = dist(x.coords(), y.coords());
        for (n, w) in worst.iter_mut().enumerate().skip(3) {
            let gap = (dist(&x.coords()[..n], &y.coords()[..n]) - full).abs();
            *w = w.max(gap);
        }
    }
    for (n, &w) in worst.iter().enumerate().skip(3) {
        c.check(w <= tail_bound(n), || {
            format!("N={n}: |d_N − d_20| = {w} > {}", tail_bound(n))
        });
    }
    c.check(tail_bound(3) == 0.25, || "tail_bound(3) != 1/4".into());
    for n in 1..20 {
        c.check(tail_bound(n + 1) * 2.0 == tail_bound(n), || {
            format!("tail_bound does not halve at {n}")
        });
    }
    outcome(
        3,
        c,
        json!({
            "pairs": 10_000,
            "tail_bound_3": tail_bound(3),
            "max_gap_by_n": (3..=20).map(|n| json!({ "n": n, "gap": worst[n], "bound": tail_bound(n) })).collect::<Vec<_>>(),
        }),
    )
}

fn classic_remainders() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let one = model(vec![F::StereoX, F::StereoY])?;
    let one_gap = one
        .remainder()
        .first()
        .map_or(f64::INFINITY, |k| dist(k.center.coords(), &[0.0, 1.0]));
    c.check(one.remainder().len() == 1, || {
        format!("one-point: {} clusters", one.remainder().len())
    });
    c.check(one_gap <= 0.01, || {
        format!("one-point center {one_gap} from (0,1)")
    });

    let two = model(vec![tanh()])?;
    let ends: Vec<f64> = two
        .remainder()
        .iter()
        .map(|k| k.center.coords()[0])
        .collect();
    c.check(ends.len() == 2, || {
        format!("two-point: {} clusters", ends.len())
    });
    let two_gap = [-1.0, 1.0]
        .iter()
        .map(|e| {
            ends.iter()
                .map(|v| (v - e).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    c.check(two_gap <= 0.01, || {
        format!("two-point centers {two_gap} from ±1")
    });
    Ok(outcome(
        4,
        c,
        json!({
            "one_point": { "clusters": one.remainder().len(), "center_distance": one_gap, "centers": one.centers() },
            "two_point": { "clusters": two.remainder().len(), "center_distance": two_gap, "centers": two.centers() },
        }),
    ))
}

fn cos_fails() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let mut rows = Vec::new();
    for (name, fs) in [
        ("one_point", vec![F::StereoX, F::StereoY]),
        ("two_point", vec![tanh()]),
    ] {
        let m = model(fs)?;
        let report = check_extendability(&m, &cos(1.0), &DEFAULT_DELTAS)?;
        match &report.verdict {
            Verdict::FailsToExtend {
                cluster,
                oscillation,
                witnesses,
                offending,
            } => {
                c.check(*oscillation >= 1.9, || {
                    format!("{name}: oscillation {oscillation}")
                });
                c.check(*witnesses >= 100, || {
                    format!("{name}: {witnesses} witnesses")
                });
                if name == "two_point" {
                    let plus = m.remainder().iter().position(|k| k.side == TailSide::Plus);
                    c.check(plus.is_some_and(|p| offending.contains(&p)), || {
                        "two-point: the +inf cluster is not offending".into()
                    });
                }
                rows.push(json!({
                    "model": name,
                    "verdict": report.verdict.name(),
                    "cluster": cluster,
                    "oscillation": oscillation,
                    "witnesses": witnesses,
                    "offending": offending,
                }));
            }
            v => c.check(false, || format!("{name}: verdict {}", v.name())),
        }
    }
    Ok(outcome(5, c, json!({ "models": rows })))
}

fn gamma_remainder() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let fs = vec![tanh(), cos(1.0)];
    let m = model(fs.clone())?;
    let p = m.params();

    // Brute-force oracle: dense tail samples on an unrelated step.
    let step = 0.00731;
    let count = ((p.r_tail_hi - p.r_tail_lo) / step) as usize;
    let mut oracle = Vec::with_capacity(2 * count + 2);
    for i in 0..=count {
        let x = p.r_tail_lo + i as f64 * step;
        for s in [-x, x] {
            oracle.push(fs.iter().map(|f| f.evaluate(s)).collect::<Vec<f64>>());
        }
    }
    let mut to_set: f64 = 0.0;
    let mut to_oracle: f64 = 0.0;
    for k in m.remainder() {
        let q = k.center.coords();
        to_set = to_set.max((1.0 - q[0].abs()).min(1.0) + (q[1].abs() - 1.0).clamp(0.0, 1.0) / 2.0);
        to_oracle = to_oracle.max(
            oracle
                .iter()
                .map(|o| dist(q, o))
                .fold(f64::INFINITY, f64::min),
        );
    }
    c.check(to_set <= 0.05, || {
        format!("centers {to_set} from {{±1}}×[−1,1]")
    });
    c.check(to_oracle <= 0.05, || {
        format!("centers {to_oracle} from the tail oracle")
    });

    let mut reach = Vec::new();
    for side in [-1.0, 1.0] {
        let cs: Vec<f64> = m
            .remainder()
            .iter()
            .filter(|k| k.center.coords()[0] * side > 0.0)
            .map(|k| k.center.coords()[1])
            .collect();
        let r = (0..=2000)
            .map(|i| -1.0 + i as f64 * 1e-3)
            .map(|v| {
                cs.iter()
                    .map(|w| (w - v).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        c.check(r <= 0.1, || {
            format!("side {side}: cos values left {r} from a center")
        });
        reach.push(json!({ "side": side, "clusters": cs.len(), "cover_radius": r }));
    }
    Ok(outcome(
        6,
        c,
        json!({
            "clusters": m.remainder().len(),
            "oracle_samples": oracle.len(),
            "hausdorff_to_target": to_set,
            "hausdorff_to_oracle": to_oracle,
            "cos_cover": reach,
        }),
    ))
}

fn projections() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let families = vec![
        vec![F::StereoX, F::StereoY],
        vec![tanh()],
        vec![tanh(), cos(1.0)],
        vec![tanh(), cos(1.0), cos(2.0)],
        vec![tanh(), cos(1.0), cos(2f64.sqrt())],
        chain::chain_families(5)
            .pop()
            .expect("five levels")
            .functions()
            .to_vec(),
    ];
    let mut rows = Vec::new();
    for fs in families {
        let m = model(fs)?;
        let mut worst: f64 = 0.0;
        for n in 0..m.dim() {
            let ext = extend_by_projection(&m, n)?;
            let f = &m.family().functions()[n];
            for s in m.image_cloud() {
                let v = ext.evaluate(&m.embed(s.parameter))?;
                worst = worst.max((v - f.evaluate(s.parameter)).abs());
                worst = worst.max((ext.evaluate(&s.point)? - f.evaluate(s.parameter)).abs());
            }
        }
        let name = m
            .family()
            .functions()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        c.check(worst == 0.0, || {
            format!("{{{name}}}: factorization error {worst:e}")
        });
        rows.push(
            json!({ "family": name, "grid_points": m.image_cloud().len(), "max_error": worst }),
        );
    }
    Ok(outcome(7, c, json!({ "models": rows })))
}

fn witness_json(cmp: &Comparison) -> Value {
    serde_json::to_value(cmp).unwrap_or(Value::Null)
}

fn lattice() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let two = model(vec![tanh()])?;
    let gamma = model(vec![tanh(), cos(1.0)])?;
    let gamma2 = model(vec![tanh(), cos(1.0), cos(2.0)])?;

    let mut pair = |name: &str, larger: &CompactificationModel, smaller: &CompactificationModel| {
        let cmp = compare(larger, smaller);
        match cmp.witness() {
            Some(w) => c.check(w.residual <= BOND_TOLERANCE, || {
                format!("{name}: residual {}", w.residual)
            }),
            None => c.check(false, || format!("{name}: no witness")),
        }
        json!({ "pair": name, "comparison": witness_json(&cmp) })
    };
    let rows = vec![
        pair("{tanh, cos} over {tanh}", &gamma, &two),
        pair("{tanh, cos, cos 2x} over {tanh, cos}", &gamma2, &gamma),
    ];

    let down = compare(&gamma2, &gamma);
    let up = compare(&gamma, &gamma2);
    let equivalent = equivalence_check(&gamma, &gamma2);
    c.check(equivalent, || {
        "{tanh, cos} and {tanh, cos, cos 2x} not equivalent".into()
    });
    let uses_chebyshev = up.witness().is_some_and(|w| {
        w.mapping.iter().any(|m| {
            matches!(
                m,
                CoordinateMap::Chebyshev {
                    degree: 2,
                    source: 1
                }
            )
        })
    });
    c.check(uses_chebyshev, || {
        "the upward witness does not use T_2".into()
    });
    Ok(outcome(
        8,
        c,
        json!({
            "pairs": rows,
            "equivalent": equivalent,
            "forward": witness_json(&down),
            "backward": witness_json(&up),
        }),
    ))
}

fn strict_enlargement() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let two = model(vec![tanh()])?;
    let e = enlarge(&two, &cos(1.0))?;
    c.check(e.strict, || "enlargement not marked strict".into());
    c.check(e.old_report.verdict.fails(), || {
        format!("old model: {}", e.old_report.verdict.name())
    });
    let new = check_extendability(&e.model, &cos(1.0), &DEFAULT_DELTAS)?;
    c.check(
        new.verdict
            == Verdict::ExtendsByProjection {
                coordinate: 1,
                degree: 1,
            },
        || format!("new model: {:?}", new.verdict),
    );
    c.check(e.witness.residual == 0.0, || {
        format!("projection residual {}", e.witness.residual)
    });
    Ok(outcome(
        9,
        c,
        json!({
            "strict": e.strict,
            "old_verdict": e.old_report.verdict,
            "new_verdict": new.verdict,
            "new_numeric_verdict": new.numeric.name(),
            "old_clusters": two.remainder().len(),
            "new_clusters": e.model.remainder().len(),
            "witness": e.witness,
        }),
    ))
}

fn inverse_limit() -> compactify_core::Result<Outcome> {
    let mut c = Checks::default();
    let system = chain::build_chain(5, BuildParams::default())?;
    let depth = system.depth();
    let bonds: Vec<f64> = system.bonds().iter().map(|b| b.residual).collect();
    for (n, r) in bonds.iter().enumerate() {
        c.check(*r <= BOND_TOLERANCE, || format!("bond {n}: residual {r}"));
    }

    let r_image = system.levels()[0].params().r_image;
    let mut thread_worst: f64 = 0.0;
    for i in 0..1000 {
        let x = -r_image + 2.0 * r_image * i as f64 / 999.0;
        let t = system.make_thread_from_parameter(x);
        let top = t.entry(depth - 1).expect("full thread");
        for n in 0..depth {
            let down = system.project(depth - 1, n, top)?;
            thread_worst =
                thread_worst.max(dist(down.coords(), system.levels()[n].embed(x).coords()));
        }
        for r in system.compatibility_residuals(&t)? {
            thread_worst = thread_worst.max(r);
        }
    }
    c.check(thread_worst <= 1e-9, || {
        format!("thread residual {thread_worst}")
    });

    let (mut lifted, mut failed) = (0usize, 0usize);
    let mut lift_worst: f64 = 0.0;
    for (n, level) in system.levels().iter().enumerate() {
        let radius = 2.0 * level.params().cluster_radius;
        for s in level.image_cloud().iter().step_by(1000) {
            match system.lift_point(n, &s.point) {
                Ok(t) => {
                    lifted += 1;
                    let mut worst =
                        dist(t.entry(n).expect("full thread").coords(), s.point.coords());
                    for r in system.compatibility_residuals(&t)? {
                        worst = worst.max(r);
                    }
                    lift_worst = lift_worst.max(worst);
                    c.check(worst <= radius, || {
                        format!("level {n}, x={}: lift residual {worst}", s.parameter)
                    });
                }
                Err(e) => {
                    failed += 1;
                    c.check(false, || format!("level {n}, x={}: {e}", s.parameter));
                }
            }
        }
    }

    let limit = system.chain_limit()?;
    let dominations = chain::dominations(&system, &limit);
    for d in &dominations {
        c.check(d.witness.is_some(), || {
            format!(
                "limit does not dominate level {}: {}",
                d.level,
                d.reason.clone().unwrap_or_default()
            )
        });
    }
    Ok(outcome(
        10,
        c,
        json!({
            "levels": depth,
            "families": system.levels().iter().map(|m| m.family().functions().iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "clusters": system.levels().iter().map(|m| m.remainder().len()).collect::<Vec<_>>(),
            "bond_residuals": bonds,
            "thread_grid_points": 1000,
            "thread_max_residual": thread_worst,
            "lifts": lifted,
            "lift_failures": failed,
            "lift_max_residual": lift_worst,
            "limit_clusters": limit.remainder().len(),
            "limit_dominates": dominations.iter().map(|d| d.witness.is_some()).collect::<Vec<_>>(),
        }),
    ))
}

/// Reruns criteria 1 to 10 and compares with `first` (computed if absent).
fn determinism(seed: u64, first: Option<&[Outcome]>) -> Outcome {
    let mut c = Checks::default();
    let ids: Vec<u8> = (1..=10).collect();
    let owned;
    let first = match first {
        Some(f) => f,
        None => {
            owned = run_many(&ids, seed, worker_count()).0;
            &owned
        }
    };
    let second = run_many(&ids, seed, worker_count()).0;
    let a = serde_json::to_string(first).expect("outcomes serialize");
    let b = serde_json::to_string(&second).expect("outcomes serialize");
    c.check(a == b, || "a second run of criteria 1-10 differs".into());
    outcome(
        11,
        c,
        json!({ "compared_criteria": ids, "identical": a == b, "bytes": a.len() }),
    )
}

/// Worker threads: available parallelism, capped by `COMPACTIFY_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("COMPACTIFY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => available.min(cap),
        _ => available,
    }
}

fn run_many(ids: &[u8], seed: u64, threads: usize) -> (Vec<Outcome>, Vec<Timing>) {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(Outcome, f64)>>> = Mutex::new(vec![None; ids.len()]);
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, ids.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&id) = ids.get(i) else { break };
                let start = Instant::now();
                let o = run(id, seed);
                let secs = start.elapsed().as_secs_f64();
                results.lock().expect("no worker panicked")[i] = Some((o, secs));
            });
        }
    });
    let done = results.into_inner().expect("no worker panicked");
    let mut outcomes = Vec::with_capacity(ids.len());
    let mut timings = Vec::with_capacity(ids.len());
    for (id, r) in ids.iter().zip(done) {
        let (o, secs) = r.expect("every criterion ran");
        timings.push(Timing {
            name: format!("criterion {id}"),
            seconds: secs,
        });
        outcomes.push(o);
    }
    (outcomes, timings)
}

/// Runs the selected criteria (in increasing id order) on up to `threads`
/// workers. Criterion 11 reuses the first pass over 1 to 10 when all of them
/// are selected.
pub fn run_suite(ids: &[u8], seed: u64, threads: usize) -> (Vec<Outcome>, Vec<Timing>) {
    let mut ids: Vec<u8> = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let with_determinism = ids.contains(&11);
    ids.retain(|&id| id != 11);
    let (mut outcomes, mut timings) = run_many(&ids, seed, threads);
    if with_determinism {
        let start = Instant::now();
        let complete = ids == (1..=10).collect::<Vec<u8>>();
        let o = determinism(seed, complete.then_some(outcomes.as_slice()));
        timings.push(Timing {
            name: "criterion 11".into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        outcomes.push(o);
    }
    (outcomes, timings)
}
