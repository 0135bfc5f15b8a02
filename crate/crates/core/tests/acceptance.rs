//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! wall-clock budget. Runs sequentially so timings are not skewed by other
//! tests.

use std::process::ExitCode;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use ltcg_core::cayley::{bfs_metric, eigenvalue_rejection_identity, graph_from_code, tester_graph};
use ltcg_core::corpus;
use ltcg_core::embed::{distortion, khot_naor_bound, basis_tester_bound, linearize, CutEmbedding};
use ltcg_core::spectrum::{hypercontractivity_check, ltc_from_sg, probe_sets, sg_from_ltc, sse_bound_check};
use ltcg_core::tester::{boosted_rejection, covradius_boost};
use ltcg_core::{
    optimal_tester, BitVec, CosetTable, Extended, LinearCode, Rational, Scalar, SpectrumGenerator, Tester,
};

type Q = Rational;
type Outcome = Result<String, String>;

fn q(n: i64, d: u64) -> Q {
    Q::from_ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table(code: &Arc<LinearCode>) -> Result<CosetTable, String> {
    CosetTable::new(code.clone()).map_err(|e| e.to_string())
}

/// Every corpus (code, tester) pair, exact.
fn corpus_pairs() -> Vec<(String, Tester<Q>)> {
    let mut out = Vec::new();
    for (name, code) in corpus::codes() {
        for (kind, t) in corpus::canonical_testers::<Q>(&code).expect("corpus testers") {
            out.push((format!("{name}/{kind}"), t));
        }
    }
    out
}

fn criterion1() -> Outcome {
    let mut checked = 0;
    for (name, code) in corpus::codes().into_iter().filter(|(_, c)| c.n() <= 12) {
        let g = graph_from_code::<Q>(&code).map_err(|e| e.to_string())?;
        let metric = bfs_metric(&g).map_err(|e| e.to_string())?;
        let words: Vec<u64> = code.codewords().iter().map(|c| c.to_u64().unwrap()).collect();
        let n = code.n();
        for v in 0..1u64 << n {
            let brute = words.iter().map(|c| (v ^ c).count_ones()).min().unwrap();
            let s = code.syndrome_index(&BitVec::from_u64(v, n));
            ensure(metric[s] == brute, || format!("{name}: word {v:b} metric {} vs {brute}", metric[s]))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} codes, all words"))
}

fn criterion2() -> Outcome {
    let mut pairs = 0;
    for (name, t) in corpus_pairs() {
        let r = eigenvalue_rejection_identity(&t).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.max_error == 0.0, || format!("{name}: error {}", r.max_error))?;
        pairs += 1;
    }
    for (name, code) in corpus::codes() {
        for seed in 0..50 {
            let t = corpus::random_tester::<Q>(&code, seed).map_err(|e| e.to_string())?;
            let r = eigenvalue_rejection_identity(&t).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            ensure(r.max_error == 0.0, || format!("{name} seed {seed}: error {}", r.max_error))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} testers"))
}

fn criterion3() -> Outcome {
    let codes = corpus::codes();
    let find = |n: &str| codes.iter().find(|(name, _)| *name == n).unwrap().1.clone();
    let ham = find("hamming74");
    let rep4 = find("rep41");
    // Independently built feasible testers.
    let simplex = corpus::all_nonzero_tester::<Q>(&ham).map_err(|e| e.to_string())?;
    let weight2 = Tester::<Q>::uniform(
        rep4.clone(),
        (0..16u64).map(|x| BitVec::from_u64(x, 4)).filter(|v| v.weight() == 2).collect(),
    )
    .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (name, code, feasible, want) in [("hamming74", ham, simplex, q(1, 1)), ("rep41", rep4, weight2, q(3, 2))] {
        let tbl = table(&code)?;
        let opt = optimal_tester::<Q>(&tbl).map_err(|e| format!("{name}: {e}"))?;
        ensure(opt.ratio == want, || format!("{name}: LP optimum {}", opt.ratio.render()))?;
        opt.certificate.verify(&tbl).map_err(|e| format!("{name}: certificate {e}"))?;
        ensure(opt.certificate.value == want, || format!("{name}: dual value {}", opt.certificate.value.render()))?;
        let r = feasible.soundness(&tbl, None).map_err(|e| e.to_string())?;
        ensure(r.ratio == Extended::Finite(want.clone()), || format!("{name}: feasible ratio {}", r.ratio.render()))?;
        let lp = opt.tester.soundness(&tbl, None).map_err(|e| e.to_string())?;
        ensure(lp.ratio == Extended::Finite(want.clone()), || format!("{name}: LP tester ratio {}", lp.ratio.render()))?;
        parts.push(format!("{name} = {}", want.render()));
    }
    Ok(parts.join(", "))
}

fn criterion4() -> Outcome {
    let mut checks = 0;
    let mut gated = 0;
    for (name, t) in corpus_pairs() {
        let tbl = table(t.code())?;
        let base = t.soundness(&tbl, None).map_err(|e| e.to_string())?;
        let rej = t.coset_rejections().map_err(|e| e.to_string())?;
        let max_rej = rej.iter().fold(Q::from_count(0), |m, r| if *r > m { r.clone() } else { m });
        for ell in 1..=4u32 {
            let b = t.boost_explicit(ell).map_err(|e| format!("{name} ell {ell}: {e}"))?;
            let brej = b.coset_rejections().map_err(|e| e.to_string())?;
            for (s, (r, br)) in rej.iter().zip(&brej).enumerate() {
                ensure(*br == boosted_rejection(r, ell), || format!("{name} ell {ell} coset {s}: {}", br.render()))?;
            }
            let after = b.soundness(&tbl, None).map_err(|e| e.to_string())?;
            let l = Q::from_count(ell as usize);
            ensure(after.epsilon <= l.clone() * base.epsilon.clone(), || format!("{name} ell {ell}: smoothness"))?;
            if Q::from_count(4 * ell as usize) * max_rej.clone() <= Q::from_count(1) {
                ensure(after.delta >= l * base.delta.clone() / Q::from_count(2), || {
                    format!("{name} ell {ell}: soundness {}", after.delta.render())
                })?;
                gated += 1;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} boosts, {gated} with the soundness premise"))
}

fn criterion5() -> Outcome {
    let codes = corpus::codes();
    let ham = codes.iter().find(|(n, _)| *n == "hamming74").unwrap().1.clone();
    let t = corpus::all_nonzero_tester::<Q>(&ham)
        .and_then(|t| t.diluted(q(7, 64)))
        .map_err(|e| e.to_string())?;
    let tbl = table(&ham)?;
    let r = covradius_boost(&t, &tbl, &Q::from_count(1)).map_err(|e| e.to_string())?;
    ensure(r.ell == Some(4), || format!("ell = {:?}", r.ell))?;
    let rej = r.tester.coset_rejections().map_err(|e| e.to_string())?;
    ensure(rej[1..].iter().all(|x| *x == q(1695, 8192)), || format!("Rej = {}", rej[1].render()))?;
    ensure(r.report.epsilon <= q(1, 4), || format!("epsilon' = {}", r.report.epsilon.render()))?;
    ensure(r.report.delta >= q(1, 16), || format!("delta' = {}", r.report.delta.render()))?;
    Ok(format!("ell = 4, Rej = 1695/8192, epsilon' = {}, delta' = {}", r.report.epsilon.render(), r.report.delta.render()))
}

fn criterion6() -> Outcome {
    let (mut verified, mut direct) = (0, 0);
    for (name, t) in corpus_pairs() {
        let code = t.code().clone();
        let (g, b) = if code.min_distance().map_err(|e| e.to_string())? >= 3 {
            let (g, b, rep) = sg_from_ltc(&t).map_err(|e| format!("{name}: {e}"))?;
            ensure(rep.pass(), || format!("{name}: verify_sg failed {rep:?}"))?;
            let (back, t2) = ltc_from_sg(&g, &b).map_err(|e| format!("{name}: {e}"))?;
            let r2 = t2.soundness(&table(&back)?, None).map_err(|e| e.to_string())?;
            let two = Q::from_count(2);
            ensure(r2.epsilon <= rep.mu.clone() / two.clone(), || format!("{name}: epsilon above mu/2"))?;
            ensure(r2.delta >= rep.nu.clone() / two, || format!("{name}: delta below nu/2"))?;
            verified += 1;
            (g, b)
        } else {
            // Distance below 3: the construction still inverts.
            direct += 1;
            let g = tester_graph(&t).map_err(|e| e.to_string())?;
            let b = SpectrumGenerator::from_packed(code.h(), code.syndrome_columns().to_vec())
                .map_err(|e| e.to_string())?;
            (g, b)
        };
        let (back, t2) = ltc_from_sg(&g, &b).map_err(|e| format!("{name}: {e}"))?;
        ensure(back.parity_check().to_text() == code.parity_check().to_text(), || format!("{name}: pcheck differs"))?;
        ensure(t2.to_text("c") == t.to_text("c"), || format!("{name}: tester differs"))?;
    }
    Ok(format!("{} round trips, {verified} verified at (2ε, 2δ, d), {direct} below distance 3", verified + direct))
}

fn criterion7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    for h in [8usize, 10] {
        let b = SpectrumGenerator::standard(h).unwrap().functionals();
        for d in 1..=3usize {
            let r = hypercontractivity_check(&b, d, 200, (h * 10 + d) as u64).map_err(|e| format!("h {h} d {d}: {e}"))?;
            worst = worst.max(r.max_ratio / r.bound);
            parseval = parseval.max(r.max_parseval_error);
        }
    }
    Ok(format!("1200 polynomials, max E f⁴/(9^d (E f²)²) = {worst:.4}, Parseval error {parseval:.1e}"))
}

fn criterion8() -> Outcome {
    let (mut graphs, mut sets, mut vacuous) = (0, 0, 0);
    for (i, (name, t)) in corpus_pairs().into_iter().enumerate() {
        if t.code().min_distance().map_err(|e| e.to_string())? < 3 {
            continue;
        }
        let (g, b, rep) = sg_from_ltc(&t).map_err(|e| format!("{name}: {e}"))?;
        if !rep.pass() {
            continue;
        }
        let gf = g.convert::<f64>();
        let probes = probe_sets(g.h(), 1000, i as u64).map_err(|e| e.to_string())?;
        let r = sse_bound_check(&gf, &b, rep.mu.to_f64(), rep.nu.to_f64(), rep.d, &probes)
            .map_err(|e| format!("{name}: {e}"))?;
        graphs += 1;
        sets += r.probes.len();
        vacuous += r.vacuous();
    }
    Ok(format!("{graphs} graphs, {sets} sets, {} with a positive bound, {vacuous} vacuous", sets - vacuous))
}

fn criterion9() -> Outcome {
    let codes = corpus::codes();
    let results: Vec<Result<String, String>> = thread::scope(|s| {
        let handles: Vec<_> = codes
            .iter()
            .map(|(name, code)| {
                s.spawn(move || -> Result<String, String> {
                    let tbl = table(code)?;
                    let kn = khot_naor_bound::<Q>(code, &tbl).map_err(|e| format!("{name}: {e}"))?;
                    let opt = optimal_tester::<Q>(&tbl).map_err(|e| format!("{name}: {e}"))?;
                    ensure(kn.bound <= opt.ratio, || {
                        format!("{name}: bound {} above optimum {}", kn.bound.render(), opt.ratio.render())
                    })?;
                    Ok(format!("{name} {} ≤ {}", kn.bound.render(), opt.ratio.render()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let chain = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut basis = 0;
    for (name, code) in codes.iter().filter(|(n, _)| n.starts_with("hamming") || n.starts_with("rep")) {
        let t = Tester::<Q>::uniform(code.clone(), code.parity_check().rows().to_vec()).map_err(|e| e.to_string())?;
        let r = basis_tester_bound(code, &t, &table(code)?).map_err(|e| format!("{name}: {e}"))?;
        ensure(Extended::Finite(r.bound.clone()).approx_le(&r.ratio), || format!("{name}: basis bound"))?;
        basis += 1;
    }
    Ok(format!("{} codes; {basis} basis testers", chain.len()))
}

fn criterion10() -> Outcome {
    let mut checked = 0;
    for (name, code) in corpus::codes() {
        let h = code.h();
        for seed in 0..100u64 {
            let count = 1 + (seed % 4) as usize;
            let e = CutEmbedding::<Q>::random(h, count, seed).map_err(|e| e.to_string())?;
            // Small codes also go through tables on the whole space.
            let input = if code.n() <= 10 {
                let functions = e
                    .functions()
                    .iter()
                    .map(|(f, p)| {
                        let lifted = (0..1u64 << code.n())
                            .map(|v| f[code.syndrome_index(&BitVec::from_u64(v, code.n()))])
                            .collect();
                        (lifted, p.clone())
                    })
                    .collect();
                CutEmbedding::new(code.n(), functions).map_err(|e| e.to_string())?
            } else {
                e
            };
            let l = linearize(&input, &code).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            ensure(l.after.distortion.approx_le(&l.before.distortion), || {
                format!("{name} seed {seed}: {} > {}", l.after.distortion.render(), l.before.distortion.render())
            })?;
            checked += 1;
        }
    }
    let zero = Arc::new(ltcg_core::codes::zoo::zero_code(2));
    let e = CutEmbedding::<Q>::new(2, vec![(vec![false, false, false, true], Q::from_count(1))]).unwrap();
    let l = linearize(&e, &zero).map_err(|e| e.to_string())?;
    ensure(l.before.distortion.is_infinite(), || "indicator cut should be infinite".into())?;
    ensure(l.tester.support().iter().all(|(_, p)| *p == q(1, 4)) && l.tester.support().len() == 4, || {
        "weights should be 1/4 each".into()
    })?;
    let g = graph_from_code::<Q>(&zero).unwrap();
    let lin = distortion(&CutEmbedding::from_tester(&l.tester).unwrap(), &g).map_err(|e| e.to_string())?;
    ensure(lin.distortion == Extended::Finite(q(2, 1)), || format!("distortion {}", lin.distortion.render()))?;
    Ok(format!("{checked} embeddings; +∞ → 2 reproduced"))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("coset-metric identity", 5, criterion1),
        ("eigenvalue-rejection identity", 10, criterion2),
        ("embedding LP values", 30, criterion3),
        ("boost closed form and bounds", 10, criterion4),
        ("covering-radius tester", 1, criterion5),
        ("spectrum-generator round trip", 10, criterion6),
        ("hypercontractivity", 60, criterion7),
        ("small-set expansion", 60, criterion8),
        ("lower bounds", 5, criterion9),
        ("linearization", 30, criterion10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        match outcome {
            Ok(detail) if !over => {
                println!("PASS {id:>2} {name} [{:.2}s/{budget}s]: {detail}", took.as_secs_f64());
            }
            Ok(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{:.2}s/{budget}s]: over budget; {detail}", took.as_secs_f64());
            }
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{:.2}s/{budget}s]: {why}", took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
