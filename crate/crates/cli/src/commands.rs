use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use ltcg_core::cayley::{code_from_graph, eigenvalue_rejection_identity, graph_from_code, tester_graph};
use ltcg_core::embed::{basis_tester_bound, distortion, khot_naor_bound, linearize, DistortionReport};
use ltcg_core::spectrum::{
    hypercontractivity_check, ltc_from_sg, probe_sets, sg_from_ltc, sse_bound_check, verify_sg, SGReport,
};
use ltcg_core::tester::{boosted_rejection, covradius_boost};
use ltcg_core::{
    corpus, optimal_tester, CayleyGraph, CosetTable, CutEmbedding, LinearCode, Scalar, SpectrumGenerator,
    Tester,
};
use serde_json::{json, Value};

use crate::report::{extended, float, scalar, sibling, Report};
use crate::{Cli, Command};

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CodeInfo { .. } => "code-info",
        Command::TesterInfo { .. } => "tester-info",
        Command::Boost { .. } => "boost",
        Command::CovradiusBoost { .. } => "covradius-boost",
        Command::OptimalTester { .. } => "optimal-tester",
        Command::FromCode { .. } => "from-code",
        Command::ToCode { .. } => "to-code",
        Command::Graph { .. } => "graph",
        Command::VerifySg { .. } => "verify-sg",
        Command::SgFromLtc { .. } => "sg-from-ltc",
        Command::LtcFromSg { .. } => "ltc-from-sg",
        Command::SseProbe { .. } => "sse-probe",
        Command::Hypercon { .. } => "hypercon",
        Command::Distortion { .. } => "distortion",
        Command::Linearize { .. } => "linearize",
        Command::KnBound { .. } => "kn-bound",
        Command::BasisBound { .. } => "basis-bound",
        Command::Corpus { .. } => "corpus",
    }
}

fn load_code(r: &mut Report, path: &Path) -> Result<Arc<LinearCode>> {
    let text = r.read(path)?;
    let code = text.parse().with_context(|| format!("parsing {}", path.display()))?;
    Ok(Arc::new(code))
}

/// Tester file and the code file it names.
fn load_tester<S: Scalar>(r: &mut Report, path: &Path) -> Result<(String, Tester<S>)> {
    let text = r.read(path)?;
    let mut resolved = Ok(());
    let parsed = Tester::parse(&text, |code_ref| {
        load_code(r, &sibling(path, code_ref)).map_err(|e| {
            let msg = format!("{e:#}");
            resolved = Err(e);
            ltcg_core::Error::PreconditionFailed(msg)
        })
    });
    resolved?;
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn load_graph<S: Scalar>(r: &mut Report, path: &Path) -> Result<CayleyGraph<S>> {
    let text = r.read(path)?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn load_sg(r: &mut Report, path: &Path) -> Result<SpectrumGenerator> {
    let text = r.read(path)?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn load_embedding<S: Scalar>(r: &mut Report, path: &Path) -> Result<CutEmbedding<S>> {
    let text = r.read(path)?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn parse_scalar<S: Scalar>(flag: &str, s: &str) -> Result<S> {
    S::parse_prob(s).ok_or_else(|| anyhow!("--{flag}: cannot parse {s:?} as a number"))
}

fn support<S: Scalar>(t: &Tester<S>) -> Value {
    Value::Array(
        t.support()
            .iter()
            .map(|(v, p)| json!([scalar(p), v.to_string()]))
            .collect(),
    )
}

fn distortion_json<S: Scalar>(d: &DistortionReport<S>) -> Value {
    json!({
        "max_stretch": scalar(&d.max_stretch),
        "min_stretch": scalar(&d.min_stretch),
        "distortion": extended(&d.distortion),
    })
}

fn sg_json<S: Scalar>(r: &mut Report, sg: &SGReport<S>) {
    r.set("mu", scalar(&sg.mu))
        .set("nu", scalar(&sg.nu))
        .set("d", sg.d)
        .set("width", sg.width)
        .set("independent", sg.independent)
        .set("large_eigenvalues", sg.large_eigenvalues())
        .set("spectral_decay", sg.spectral_decay());
    let large: Vec<Value> = sg
        .large_eigenvalue_failures
        .iter()
        .map(|(i, l)| json!({"index": i, "lambda": scalar(l)}))
        .collect();
    let decay: Vec<Value> = sg
        .decay_failures
        .iter()
        .map(|(a, l, rk)| json!({"functional": a, "lambda": scalar(l), "rank": rk}))
        .collect();
    r.set("large_eigenvalue_failures", large)
        .set("decay_failures", decay);
    r.pass = sg.pass();
}

fn write_out(r: &mut Report, out: &Option<std::path::PathBuf>, key: &str, text: String) -> Result<()> {
    match out {
        Some(path) => {
            r.write(path, &text)?;
            r.set(key, path.display().to_string());
        }
        None => {
            r.set(key, text);
        }
    }
    Ok(())
}

pub fn run<S: Scalar>(cli: &Cli) -> Result<Report> {
    let seed = cli.global.seed;
    let mut r = Report::new(name(&cli.command));
    match &cli.command {
        Command::CodeInfo { code } => {
            let c = load_code(&mut r, code)?;
            let tbl = CosetTable::new(c.clone())?;
            r.set("n", c.n())
                .set("k", c.k())
                .set("d", c.min_distance()?)
                .set("dual_d", c.dual_distance()?)
                .set("t", tbl.covering_radius());
        }
        Command::TesterInfo { tester, cap } => {
            let (_, t) = load_tester::<S>(&mut r, tester)?;
            let tbl = CosetTable::new(t.code().clone())?;
            let rep = t.soundness(&tbl, *cap)?;
            r.set("epsilon", scalar(&rep.epsilon))
                .set("delta", scalar(&rep.delta))
                .set("ratio", extended(&rep.ratio))
                .set("t", rep.covering_radius)
                .set("basis_tester", t.is_basis_tester())
                .set("support_size", t.support().len());
            if let (Some(c), Some(d)) = (rep.cap, &rep.capped_delta) {
                r.set("cap", c).set("capped_delta", scalar(d));
            }
        }
        Command::Boost { tester, ell, out } => {
            let (code_ref, t) = load_tester::<S>(&mut r, tester)?;
            let tbl = CosetTable::new(t.code().clone())?;
            let before = t.soundness(&tbl, None)?;
            let rej = t.coset_rejections()?;
            let b = t.boost(*ell)?;
            let after = b.soundness(&tbl, None)?;
            let brej = b.coset_rejections()?;
            let mut max_error = 0.0f64;
            for (s, (x, y)) in rej.iter().zip(&brej).enumerate() {
                let want = boosted_rejection(x, *ell);
                if !want.approx_eq(y) {
                    return Err(ltcg_core::Error::IdentityViolated(format!(
                        "coset {s}: boosted Rej {} but closed form {}",
                        y.render(),
                        want.render()
                    ))
                    .into());
                }
                max_error = max_error.max((want - y.clone()).abs().to_f64());
            }
            let l = S::from_count(*ell as usize);
            let max_rej = rej.iter().fold(S::zero(), |m, x| if *x > m { x.clone() } else { m });
            let premise = S::one().approx_ge(&(S::from_count(4) * l.clone() * max_rej));
            let smooth_ok = (l.clone() * before.epsilon.clone()).approx_ge(&after.epsilon);
            let sound_ok = !premise || after.delta.approx_ge(&(l * before.delta.clone() / S::from_count(2)));
            r.set("ell", *ell)
                .set("epsilon", scalar(&after.epsilon))
                .set("delta", scalar(&after.delta))
                .set("ratio", extended(&after.ratio))
                .set("closed_form_max_error", float(max_error))
                .set("premise", premise)
                .set("smoothness_bound", smooth_ok)
                .set("soundness_bound", sound_ok)
                .set("support_size", b.support().len());
            r.pass = smooth_ok && sound_ok;
            if let Some(path) = out {
                r.write(path, &b.to_text(&code_ref))?;
                r.set("out", path.display().to_string());
            }
        }
        Command::CovradiusBoost { tester, c, out } => {
            let (code_ref, t) = load_tester::<S>(&mut r, tester)?;
            let c: S = parse_scalar("c", c)?;
            let tbl = CosetTable::new(t.code().clone())?;
            let b = covradius_boost(&t, &tbl, &c)?;
            r.set("ell", b.ell.map_or(Value::Null, Value::from))
                .set("epsilon", scalar(&b.report.epsilon))
                .set("delta", scalar(&b.report.delta))
                .set("t", b.report.covering_radius);
            if let Some(path) = out {
                r.write(path, &b.tester.to_text(&code_ref))?;
                r.set("out", path.display().to_string());
            }
        }
        Command::OptimalTester { code, out } => {
            let c = load_code(&mut r, code)?;
            let tbl = CosetTable::new(c.clone())?;
            let opt = optimal_tester::<S>(&tbl)?;
            opt.certificate.verify(&tbl)?;
            let rep = opt.tester.soundness(&tbl, None)?;
            r.set("epsilon", scalar(&rep.epsilon))
                .set("delta", scalar(&rep.delta))
                .set("ratio", scalar(&opt.ratio))
                .set("support", support(&opt.tester))
                .set("certificate", true);
            if let Some(path) = out {
                let code_ref = code.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
                r.write(path, &opt.tester.to_text(&code_ref))?;
                r.set("out", path.display().to_string());
            }
        }
        Command::FromCode { code, out } => {
            let c = load_code(&mut r, code)?;
            let g = graph_from_code::<S>(&c)?;
            r.set("h", g.h()).set("generators", c.n());
            write_out(&mut r, out, "graph", g.to_text())?;
        }
        Command::ToCode { graph, out } => {
            let g = load_graph::<S>(&mut r, graph)?;
            let c = code_from_graph(&g)?;
            r.set("n", c.n()).set("k", c.k());
            write_out(&mut r, out, "code", c.to_text())?;
        }
        Command::Graph { tester, out } => {
            let (_, t) = load_tester::<S>(&mut r, tester)?;
            let g = tester_graph(&t)?;
            let id = eigenvalue_rejection_identity(&t)?;
            r.set("h", g.h())
                .set("cosets", id.cosets)
                .set("identity_max_error", float(id.max_error));
            write_out(&mut r, out, "graph", g.to_text())?;
        }
        Command::VerifySg { graph, sg, mu, nu, d } => {
            let g = load_graph::<S>(&mut r, graph)?;
            let b = load_sg(&mut r, sg)?;
            let rep = verify_sg(&g, &b, parse_scalar("mu", mu)?, parse_scalar("nu", nu)?, *d)?;
            sg_json(&mut r, &rep);
        }
        Command::SgFromLtc { tester, graph_out, sg_out } => {
            let (_, t) = load_tester::<S>(&mut r, tester)?;
            let (g, b, rep) = sg_from_ltc(&t)?;
            sg_json(&mut r, &rep);
            if !rep.pass() {
                return Err(ltcg_core::Error::IdentityViolated(
                    "tester graph fails verify_sg at (2ε, 2δ, d)".into(),
                )
                .into());
            }
            r.set("n", b.n()).set("h", b.h());
            write_out(&mut r, graph_out, "graph", g.to_text())?;
            write_out(&mut r, sg_out, "sg", b.to_text())?;
        }
        Command::LtcFromSg { graph, sg, code_out, tester_out } => {
            let g = load_graph::<S>(&mut r, graph)?;
            let b = load_sg(&mut r, sg)?;
            let (c, t) = ltc_from_sg(&g, &b)?;
            r.set("n", c.n())
                .set("k", c.k())
                .set("d", c.min_distance()?)
                .set("support", support(&t));
            let code_ref = code_out
                .as_ref()
                .and_then(|p| p.file_name())
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| "code".into());
            write_out(&mut r, code_out, "code", c.to_text())?;
            write_out(&mut r, tester_out, "tester", t.to_text(&code_ref))?;
        }
        Command::SseProbe { graph, sg, mu, nu, d, sets } => {
            let g = load_graph::<S>(&mut r, graph)?;
            let b = load_sg(&mut r, sg)?;
            let probes = probe_sets(g.h(), *sets, seed)?;
            let rep = sse_bound_check(&g, &b, parse_scalar("mu", mu)?, parse_scalar("nu", nu)?, *d, &probes)?;
            r.set("sets", rep.probes.len())
                .set("vacuous", rep.vacuous())
                .set("nonvacuous", rep.nonvacuous())
                .set("min_slack", rep.min_slack().map_or(Value::Null, float))
                .set("seed", seed);
        }
        Command::Hypercon { sg, h, d, trials } => {
            let funcs = match (sg, h) {
                (Some(path), _) => load_sg(&mut r, path)?.functionals(),
                (None, Some(h)) => SpectrumGenerator::standard(*h)?.functionals(),
                (None, None) => return Err(anyhow!("either an sg file or --h is required")),
            };
            let rep = hypercontractivity_check(&funcs, *d, *trials, seed)?;
            r.set("d", rep.degree)
                .set("trials", rep.trials)
                .set("seed", rep.seed)
                .set("width", rep.width)
                .set("monomials", rep.monomials)
                .set("bound", float(rep.bound))
                .set("max_ratio", float(rep.max_ratio))
                .set("max_parseval_error", float(rep.max_parseval_error));
        }
        Command::Distortion { embedding, graph } => {
            let e = load_embedding::<S>(&mut r, embedding)?;
            let g = load_graph::<S>(&mut r, graph)?;
            let rep = distortion(&e, &g)?;
            for (k, v) in distortion_json(&rep).as_object().expect("object") {
                r.set(k, v.clone());
            }
        }
        Command::Linearize { embedding, code, out } => {
            let e = load_embedding::<S>(&mut r, embedding)?;
            let c = load_code(&mut r, code)?;
            let l = linearize(&e, &c)?;
            r.set("before", distortion_json(&l.before))
                .set("after", distortion_json(&l.after))
                .set("support", support(&l.tester));
            if let Some(path) = out {
                let code_ref = code.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
                r.write(path, &l.tester.to_text(&code_ref))?;
                r.set("out", path.display().to_string());
            }
        }
        Command::KnBound { code } => {
            let c = load_code(&mut r, code)?;
            let tbl = CosetTable::new(c.clone())?;
            let kn = khot_naor_bound::<S>(&c, &tbl)?;
            r.set("dual_d", kn.dual_distance)
                .set("n", kn.n)
                .set("t", kn.covering_radius)
                .set("bound", scalar(&kn.bound))
                .set("asymptotic", kn.asymptotic.map_or(Value::Null, float));
        }
        Command::BasisBound { tester } => {
            let (_, t) = load_tester::<S>(&mut r, tester)?;
            let tbl = CosetTable::new(t.code().clone())?;
            let b = basis_tester_bound(t.code(), &t, &tbl)?;
            r.set("ratio", extended(&b.ratio)).set("bound", scalar(&b.bound));
        }
        Command::Corpus { outdir } => {
            fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
            let mut files = Vec::new();
            for (name, code) in corpus::codes() {
                let code_file = format!("{name}.code");
                fs::write(outdir.join(&code_file), code.to_text())?;
                files.push(code_file.clone());
                for (kind, t) in corpus::canonical_testers::<S>(&code)? {
                    let file = format!("{name}.{kind}.tester");
                    fs::write(outdir.join(&file), t.to_text(&code_file))?;
                    files.push(file);
                }
            }
            r.set("outdir", outdir.display().to_string()).set("files", files);
        }
    }
    Ok(r)
}
