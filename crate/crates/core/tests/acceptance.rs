//! End-to-end acceptance checks. Run with `--nocapture` to see one line per
//! criterion.

mod common;

use std::time::{Duration, Instant};

use common::*;
use ndarray::Array2;
use rand::Rng;
use wsmd::eval::{auc, evaluate, spearman};
use wsmd::measures::*;
use wsmd::ot::*;
use wsmd::synthetic::{order_flip_dataset, same_multiset, OrderFlipConfig};

struct Outcome {
    name: &'static str,
    failures: Vec<String>,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce(&mut Vec<String>) -> String) -> Outcome {
    let mut failures = Vec::new();
    let detail = f(&mut failures);
    Outcome { name, failures, detail }
}

fn within_budget(start: Instant, budget: Duration, failures: &mut Vec<String>) -> String {
    let took = start.elapsed();
    if took > budget {
        failures.push(format!("took {took:?}, budget {budget:?}"));
    }
    format!("{:.2}s", took.as_secs_f64())
}

fn bundle(rng: &mut impl Rng, id: &str, n: usize, d: usize) -> SentenceBundle {
    let tokens = (0..n).map(|i| format!("{id}{i}")).collect();
    let embeddings = random_matrix(rng, n, d, 2.0) - 1.0;
    let sam = StructureMatrix::row_stochastic(random_stochastic(rng, n)).unwrap();
    SentenceBundle::new(id, tokens, embeddings, sam).unwrap()
}

fn euclid_loop(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), b.nrows()), |(i, j)| {
        (0..a.ncols()).map(|d| (a[[i, d]] - b[[j, d]]).powi(2)).sum::<f64>().sqrt()
    })
}

fn exact_transport_vs_brute_force() -> Outcome {
    check("exact OT equals permutation brute force (200 instances, 1e-9, < 5 s)", |failures| {
        let start = Instant::now();
        let mut rng = rng(1001);
        let mut worst = 0.0f64;
        for t in 0..200 {
            let n = rng.random_range(1..=5);
            let cost = random_matrix(&mut rng, n, n, 10.0);
            let u = uniform_weights(n).unwrap();
            let sol = solve_exact_ot(&CostMatrix::new(cost.clone()).unwrap(), &u, &u).unwrap();
            let err = (sol.cost - birkhoff_min(&cost)).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                failures.push(format!("instance {t}: error {err:e}"));
            }
        }
        let time = within_budget(start, Duration::from_secs(5), failures);
        format!("max error {worst:.1e}, {time}")
    })
}

fn gw_objective_and_gradient() -> Outcome {
    check("GW objective and gradient vs quadruple loop and finite differences (50 instances, < 10 s)", |failures| {
        let start = Instant::now();
        let mut rng = rng(1002);
        let (mut worst_obj, mut worst_grad) = (0.0f64, 0.0f64);
        for t in 0..50 {
            let n = rng.random_range(1..=6);
            let m = rng.random_range(1..=6);
            let (a, b) = if t % 2 == 0 {
                (random_stochastic(&mut rng, n), random_stochastic(&mut rng, m))
            } else {
                let a = random_matrix(&mut rng, n, n, 1.0);
                let b = random_matrix(&mut rng, m, m, 1.0);
                (&a + &a.t(), &b + &b.t())
            };
            let u = random_simplex(&mut rng, n);
            let v = random_simplex(&mut rng, m);
            let p = random_feasible_plan(&mut rng, &u, &v);
            let plan = TransportPlan::new(
                p.clone(),
                ProbVector::normalized(u.clone()).unwrap(),
                ProbVector::normalized(v.clone()).unwrap(),
            );
            let obj = match plan {
                Ok(plan) => gw_objective(
                    &StructureMatrix::new(a.clone()).unwrap(),
                    &StructureMatrix::new(b.clone()).unwrap(),
                    &plan,
                )
                .unwrap(),
                Err(_) => gw_objective_raw(a.view(), b.view(), p.view()).unwrap(),
            };
            let err = (obj - gw_quadruple(&a, &b, &p)).abs();
            worst_obj = worst_obj.max(err);
            if err > 1e-10 {
                failures.push(format!("instance {t}: objective error {err:e}"));
            }
            let g = gw_gradient_raw(a.view(), b.view(), p.view()).unwrap();
            let h = 1e-6;
            for _ in 0..20 {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..m));
                let mut plus = p.clone();
                plus[[i, j]] += h;
                let mut minus = p.clone();
                minus[[i, j]] -= h;
                let fd = (gw_quadruple(&a, &b, &plus) - gw_quadruple(&a, &b, &minus)) / (2.0 * h);
                let rel = (fd - g[[i, j]]).abs() / g[[i, j]].abs().max(1e-8);
                worst_grad = worst_grad.max(rel);
                if rel > 1e-5 {
                    failures.push(format!("instance {t}: gradient ({i},{j}) relative error {rel:e}"));
                }
            }
        }
        let time = within_budget(start, Duration::from_secs(10), failures);
        format!("objective {worst_obj:.1e}, gradient {worst_grad:.1e} relative, {time}")
    })
}

fn fgw_solver_contracts() -> Outcome {
    check("FGW: monotone, feasible, lambda=0 is WMD, lambda=1 is k*GW, decomposition (100 instances, 1e-9)", |failures| {
        let mut rng = rng(1003);
        let mut worst = 0.0f64;
        let mut note = |failures: &mut Vec<String>, t: usize, what: &str, err: f64| {
            worst = worst.max(err);
            if err > 1e-9 {
                failures.push(format!("instance {t}: {what} off by {err:e}"));
            }
        };
        for t in 0..100 {
            let n = rng.random_range(2..=6);
            let m = rng.random_range(2..=6);
            let a = bundle(&mut rng, "a", n, 4);
            let b = bundle(&mut rng, "b", m, 4);
            let cost = euclid_loop(a.embeddings(), b.embeddings());
            let lambda: f64 = rng.random();
            let wmd_value = wmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean).unwrap().cost;

            for l in [0.0, lambda, 1.0] {
                let r = wsmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean, l).unwrap();
                if r.trace.windows(2).any(|w| w[1] > w[0]) {
                    failures.push(format!("instance {t}: objective increased at lambda {l}"));
                }
                note(failures, t, "marginals", r.plan.marginal_error());
                let lin = linear_loop(&cost, r.plan.as_array());
                let quad = gw_quadruple(a.sam().as_array(), b.sam().as_array(), r.plan.as_array());
                note(failures, t, "decomposition", (r.distance - ((1.0 - l) * lin + l * r.k * quad)).abs());
                if l == 0.0 {
                    note(failures, t, "lambda=0 vs WMD", (r.distance - wmd_value).abs());
                }
                if l == 1.0 {
                    note(failures, t, "lambda=1 vs k*GW", (r.distance - r.k * quad).abs());
                }
            }

            // The solver itself with non-uniform marginals and an arbitrary k.
            let u = ProbVector::normalized(random_simplex(&mut rng, n)).unwrap();
            let v = ProbVector::normalized(random_simplex(&mut rng, m)).unwrap();
            let k = rng.random_range(0.1..50.0);
            let c = CostMatrix::new(cost.clone()).unwrap();
            let r = solve_fgw(&c, a.sam(), b.sam(), &u, &v, lambda, k, &SolverOptions::default()).unwrap();
            if r.trace.windows(2).any(|w| w[1] > w[0]) {
                failures.push(format!("instance {t}: objective increased with weighted marginals"));
            }
            note(failures, t, "weighted marginals", r.plan.marginal_error());
            let lin = linear_loop(&cost, r.plan.as_array());
            let quad = gw_quadruple(a.sam().as_array(), b.sam().as_array(), r.plan.as_array());
            note(failures, t, "weighted decomposition", (r.distance - ((1.0 - lambda) * lin + lambda * k * quad)).abs());
            let zero = solve_fgw(&c, a.sam(), b.sam(), &u, &v, 0.0, k, &SolverOptions::default()).unwrap();
            note(failures, t, "weighted lambda=0", (zero.distance - solve_exact_ot(&c, &u, &v).unwrap().cost).abs());
        }
        format!("max error {worst:.1e}")
    })
}

fn degenerate_structure_fallback() -> Outcome {
    check("one-token pairs fall back to WMD with the flag set", |failures| {
        let mut rng = rng(1004);
        for t in 0..20 {
            let a = bundle(&mut rng, "a", 1, 3);
            let b = bundle(&mut rng, "b", 1, 3);
            let w = wmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean).unwrap().cost;
            for l in [0.25, 0.5, 1.0] {
                let r = wsmd(&a, &b, &WeightScheme::Uniform, CostKind::Euclidean, l).unwrap();
                if !r.structure_fallback {
                    failures.push(format!("instance {t}: flag not set at lambda {l}"));
                }
                if (r.distance - w).abs() > 1e-12 {
                    failures.push(format!("instance {t}: {} vs WMD {w}", r.distance));
                }
            }
        }
        "20 pairs x 3 lambdas".into()
    })
}

fn metric_harness() -> Outcome {
    check("AUC and Spearman vs brute-force oracles with ties (1e-12) and edge cases", |failures| {
        let mut rng = rng(1005);
        let tied = |rng: &mut rand_chacha::ChaCha8Rng| rng.random_range(0..5) as f64;
        let mut worst = 0.0f64;
        for t in 0..20 {
            let n = rng.random_range(4..30);
            let mut bin: Vec<(f64, bool)> = (0..n).map(|_| (tied(&mut rng), rng.random())).collect();
            bin[0].1 = true;
            bin[1].1 = false;
            let (mut wins, mut total) = (0.0, 0.0);
            for p in bin.iter().filter(|s| s.1) {
                for q in bin.iter().filter(|s| !s.1) {
                    total += 1.0;
                    wins += if p.0 < q.0 { 1.0 } else if p.0 == q.0 { 0.5 } else { 0.0 };
                }
            }
            let err = (auc(&bin).unwrap() - wins / total).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                failures.push(format!("instance {t}: AUC error {err:e}"));
            }

            let mut sc: Vec<(f64, f64)> = (0..n).map(|_| (tied(&mut rng), tied(&mut rng))).collect();
            sc[0] = (0.0, 0.0);
            sc[1] = (4.0, 4.0);
            let rank = |x: &[f64]| -> Vec<f64> {
                x.iter()
                    .map(|xi| {
                        let below = x.iter().filter(|xj| *xj < xi).count() as f64;
                        let equal = x.iter().filter(|xj| *xj == xi).count() as f64;
                        below + (equal + 1.0) / 2.0
                    })
                    .collect()
            };
            let rx = rank(&sc.iter().map(|s| -s.0).collect::<Vec<_>>());
            let ry = rank(&sc.iter().map(|s| s.1).collect::<Vec<_>>());
            let mean = (n as f64 + 1.0) / 2.0;
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for (x, y) in rx.iter().zip(&ry) {
                sxy += (x - mean) * (y - mean);
                sxx += (x - mean) * (x - mean);
                syy += (y - mean) * (y - mean);
            }
            let err = (spearman(&sc).unwrap() - sxy / (sxx * syy).sqrt()).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                failures.push(format!("instance {t}: Spearman error {err:e}"));
            }
        }
        let edge = [
            auc(&[(1.0, true), (2.0, true), (3.0, false), (4.0, false)]).unwrap() == 1.0,
            auc(&[(2.0, true), (2.0, false), (2.0, true), (2.0, false)]).unwrap() == 0.5,
            spearman(&[(1.0, 4.0), (2.0, 3.0), (3.0, 1.0)]).unwrap() == 1.0,
            spearman(&[(1.0, 1.0), (2.0, 3.0), (3.0, 4.0)]).unwrap() == -1.0,
        ];
        if edge.contains(&false) {
            failures.push(format!("edge cases {edge:?}"));
        }
        format!("max error {worst:.1e}")
    })
}

fn synthetic_order_sensitivity() -> Outcome {
    check("order-flip set (200 pairs): WSMD(0.5) AUC >= 0.9, WMD AUC <= 0.6", |failures| {
        let data = order_flip_dataset(&OrderFlipConfig::default()).unwrap();
        if data.pairs.len() != 200 {
            failures.push(format!("{} pairs", data.pairs.len()));
        }
        for p in &data.pairs.pairs {
            let (a, b) = (data.bundles.require(&p.id_a).unwrap(), data.bundles.require(&p.id_b).unwrap());
            if !same_multiset(a, b) {
                failures.push(format!("{} and {} use different words", p.id_a, p.id_b));
            }
        }
        let run = |measure, lambda| {
            let config = MeasureConfig::new(measure, WeightScheme::Uniform, CostKind::Euclidean, lambda);
            evaluate(&data.pairs, &data.bundles, &config, None).unwrap().value
        };
        let fused = run(Measure::Wsmd, 0.5);
        let plain = run(Measure::Wmd, 0.0);
        let zero = run(Measure::Wsmd, 0.0);
        if fused < 0.9 {
            failures.push(format!("WSMD AUC {fused}"));
        }
        if plain > 0.6 {
            failures.push(format!("WMD AUC {plain}"));
        }
        if zero != plain {
            failures.push(format!("WSMD(0) AUC {zero} differs from WMD {plain}"));
        }
        format!("WSMD {fused:.4}, WMD {plain:.4}")
    })
}

#[test]
fn primary_criteria() {
    let outcomes = [
        exact_transport_vs_brute_force(),
        gw_objective_and_gradient(),
        fgw_solver_contracts(),
        degenerate_structure_fallback(),
        metric_harness(),
        synthetic_order_sensitivity(),
    ];
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status}  {}  [{}]", o.name, o.detail);
        for f in o.failures.iter().take(5) {
            println!("        {f}");
        }
        if !o.failures.is_empty() {
            failed.push(o.name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
