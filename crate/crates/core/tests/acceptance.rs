//! End-to-end acceptance checks. Prints one line per criterion and fails if
//! any criterion fails.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhgt::algos::{
    canonical_label, conjugate_search, enumerate_atomic_cycles, is_parabolic, translation_number,
};
use rhgt::filling::{
    dehn_scan, null_word_classes, omega_bound_check, rel_area, verify_certificate, AreaCaps,
    AreaCertificate, AreaOutcome, OmegaBound, RowStatus, ScanOptions, Step,
};
use rhgt::graph::{exact_rel_length, rel_geodesic, Path};
use rhgt::hypcheck::{bcp_check, bcp_scan, BcpParams, BcpWitness};
use rhgt::paths::analyze;
use rhgt::zoo::{presets, ElementId, DEFAULT_VERTEX_CAP};
use rhgt::{Group, Word};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(
        start.elapsed() < limit,
        format!("took {:?}, limit {:?}", start.elapsed(), limit),
    )
}

fn commutator(n: i64) -> String {
    format!("@H(a^-{n}) b^-1 @H(a^{n}) b")
}

fn area_with_cert(g: &Group, w: &Word, max_area: usize) -> Option<(usize, AreaCertificate)> {
    match rel_area(g, w, &AreaCaps::with_max_area(max_area)).ok()? {
        AreaOutcome::Found { area, certificate } => Some((area, certificate)),
        AreaOutcome::NotFoundWithinCaps { .. } => None,
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let z = presets::zz();
    let o = &*z.oracle;
    for n in 1..=8 {
        let w = z.parse(&commutator(n)).unwrap();
        ensure(
            z.pres.free_reduce(&w).len() == 4,
            format!("n={n}: word not reduced"),
        )?;
        // Both halves of the cycle are geodesic, so it has relative length 4.
        for (i, j) in [(0, 2), (2, 4), (1, 3)] {
            let e = o.normal_form(&w.subword(i, j)).unwrap();
            ensure(
                exact_rel_length(&z, &e) == Some(2),
                format!("n={n}: subpath {i}..{j} not geodesic"),
            )?;
        }
    }
    let mut areas = Vec::new();
    for n in 1..=5 {
        let w = z.parse(&commutator(n)).unwrap();
        let a = area_with_cert(&z, &w, 6).map(|x| x.0);
        ensure(a == Some(n as usize), format!("area of [a^{n},b] = {a:?}"))?;
        areas.push(n);
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "length 4 for n=1..8; areas {areas:?} in {:.1?}",
        start.elapsed()
    ))
}

fn c2() -> Outcome {
    let z = presets::zz();
    let mut margins = Vec::new();
    for n in [10, 20, 40] {
        let p = Path::parse(&z, &format!("@H(a^{n})")).unwrap();
        let q = Path::parse(&z, &format!("b @H(a^{n})")).unwrap();
        let r = bcp_check(&z, &p, &q, &BcpParams::default(), 5).map_err(|e| e.to_string())?;
        ensure(!r.passes[0], format!("n={n}: condition 1 passes"))?;
        ensure(r.margins[0] == n, format!("n={n}: margin {}", r.margins[0]))?;
        if n == 10 {
            ensure(
                r.violations.contains(&BcpWitness::Unpartnered {
                    path: 'p',
                    component: 0,
                    x_span: 10,
                }),
                "missing witness with x_span 10",
            )?;
        }
        margins.push(r.margins[0]);
    }
    Ok(format!("condition-1 margins {margins:?} at threshold 5"))
}

fn baseline_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/baselines/bcp_f2relx.json")
}

fn c3() -> Outcome {
    let start = Instant::now();
    let f = presets::f2relx();
    let probe = bcp_scan(&f, 4, 2, 100, 2024, usize::MAX).map_err(|e| e.to_string())?;
    let path = baseline_path();
    let baseline = match std::fs::read_to_string(&path) {
        Ok(text) => {
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            v["epsilon_hat"]
                .as_u64()
                .ok_or("baseline lacks epsilon_hat")? as usize
        }
        Err(_) => {
            std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
            let body = serde_json::json!({ "group": "f2relx", "pairs": 100, "seed": 2024, "k": 2, "radius": 4, "epsilon_hat": probe.epsilon_hat });
            std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap() + "\n")
                .map_err(|e| e.to_string())?;
            probe.epsilon_hat
        }
    };
    ensure(
        probe.epsilon_hat <= baseline,
        format!("ε̂ {} exceeds baseline {baseline}", probe.epsilon_hat),
    )?;
    let scan = bcp_scan(&f, 4, 2, 100, 2024, baseline).map_err(|e| e.to_string())?;
    ensure(scan.pairs == 100, "wrong pair count")?;
    ensure(
        scan.failures == 0,
        format!("{} pairs fail or violate preconditions", scan.failures),
    )?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "100 pairs pass at ε = {baseline}; measured ε̂ = {}",
        scan.epsilon_hat
    ))
}

fn c4() -> Outcome {
    let mut total = 0;
    let mut skipped = 0;
    let mut per_group = Vec::new();
    for (name, _) in presets::ALL {
        let g = presets::get(name).unwrap();
        let ball = g
            .oracle
            .enumerate_x_ball(3, DEFAULT_VERTEX_CAP)
            .map_err(|e| e.to_string())?;
        let mut count = 0;
        for a in &ball {
            for b in &ball {
                match rel_geodesic(&g, a, b) {
                    Ok(p) => {
                        let r = analyze(&g, &p);
                        ensure(
                            r.isolated.iter().all(|&x| x),
                            format!(
                                "{name}: {} from {} has a connected component",
                                g.format(&p.word),
                                g.show(a)
                            ),
                        )?;
                        count += 1;
                    }
                    Err(rhgt::Error::ExactnessUnavailable(_)) => skipped += 1,
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        total += count;
        per_group.push(format!("{name} {count}"));
    }
    Ok(format!(
        "{total} geodesics all isolated ({}); {skipped} pairs without certified length",
        per_group.join(", ")
    ))
}

fn c5() -> Outcome {
    let b = presets::bs12();
    let p = Path::parse(&b, "@H(a^2) t^-1 @H(a) t @H(a^3)").map_err(|e| e.to_string())?;
    let r = analyze(&b, &p);
    ensure(r.components.len() == 3, "expected 3 components")?;
    ensure(
        r.classes == vec![vec![0, 2], vec![1]],
        format!("classes {:?}", r.classes),
    )?;
    ensure(
        r.isolated == vec![false, true, false],
        format!("isolated {:?}", r.isolated),
    )?;
    Ok("components 1,3 connected; component 2 isolated".into())
}

/// Null words of zz of length at most 6 with area at most 4, with their
/// certificates.
fn zz_corpus() -> Vec<(Word, usize, AreaCertificate)> {
    let z = presets::zz();
    let mut out = Vec::new();
    for w in null_word_classes(&z, 6, 2) {
        if let Some((a, c)) = area_with_cert(&z, &w, 4) {
            out.push((w, a, c));
        }
    }
    out
}

fn c6() -> Outcome {
    let z = presets::zz();
    let corpus = zz_corpus();
    ensure(
        corpus.len() >= 10,
        format!("corpus has {} cycles", corpus.len()),
    )?;
    let mut worst_slack = i64::MAX;
    for (w, area, _) in &corpus {
        let p = Path::new(&*z.oracle, z.oracle.identity(), w.clone());
        let r = analyze(&z, &p);
        match omega_bound_check(&z, &p, &r, *area, 10_000).map_err(|e| e.to_string())? {
            OmegaBound::Checked {
                holds,
                slack,
                sum,
                bound,
                ..
            } => {
                ensure(holds, format!("{}: Σ = {sum} > {bound}", z.format(w)))?;
                worst_slack = worst_slack.min(slack);
            }
            OmegaBound::Inconclusive { .. } => {
                return Err(format!("{}: Ω search exhausted", z.format(w)))
            }
        }
    }
    Ok(format!(
        "{} cycles, minimum slack {worst_slack}",
        corpus.len()
    ))
}

fn c7() -> Outcome {
    let start = Instant::now();
    let fp = presets::fp23();
    let t = dehn_scan(&fp, 8, &ScanOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        t.rows.iter().all(|r| r.status == RowStatus::Exact),
        "fp23 has a non-exact row",
    )?;
    let fp_areas: Vec<usize> = t.rows.iter().map(|r| r.area).collect();
    let z = presets::zz();
    let mut statuses = Vec::new();
    for cap in 4..=8 {
        let t = dehn_scan(
            &z,
            4,
            &ScanOptions {
                sub_radius: cap,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let s = t.rows[4].status;
        let want = if cap > 6 {
            RowStatus::UnboundedEvidence
        } else {
            RowStatus::LowerBound
        };
        ensure(s == want, format!("zz cap {cap}: status {}", s.as_str()))?;
        statuses.push(format!("{cap}:{}", s.as_str()));
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "fp23 δ̂ {fp_areas:?} exact; zz n=4 {} in {:.1?}",
        statuses.join(" "),
        start.elapsed()
    ))
}

/// Letters of a printed free-group element: `x^2 y^-1` → `[1, 1, -2]`.
fn free_letters(text: &str) -> Vec<i32> {
    if text == "1" {
        return Vec::new();
    }
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (name, exp): (&str, i32) = tok
            .split_once('^')
            .map_or((tok, 1), |(n, e)| (n, e.parse().unwrap()));
        let g = match name {
            "x" => 1,
            "y" => 2,
            other => panic!("unexpected generator {other}"),
        };
        for _ in 0..exp.abs() {
            out.push(if exp > 0 { g } else { -g });
        }
    }
    out
}

fn cyclic_normal(mut w: Vec<i32>) -> Vec<i32> {
    let mut r: Vec<i32> = Vec::new();
    for l in w.drain(..) {
        if r.last() == Some(&-l) {
            r.pop();
        } else {
            r.push(l);
        }
    }
    while r.len() >= 2 && r[0] == -r[r.len() - 1] {
        r.remove(0);
        r.pop();
    }
    (0..r.len().max(1))
        .map(|k| {
            let mut v = r[k.min(r.len())..].to_vec();
            v.extend_from_slice(&r[..k.min(r.len())]);
            v
        })
        .min()
        .unwrap_or_default()
}

fn c8() -> Outcome {
    let start = Instant::now();
    let f = presets::f2relx();
    let ball = f
        .oracle
        .enumerate_x_ball(4, DEFAULT_VERTEX_CAP)
        .map_err(|e| e.to_string())?;
    let keys: Vec<Vec<i32>> = ball
        .iter()
        .map(|e| cyclic_normal(free_letters(&f.show(e))))
        .collect();
    let mut pairs = 0;
    let mut conjugate = 0;
    for (i, a) in ball.iter().enumerate() {
        for (j, b) in ball.iter().enumerate() {
            let found = conjugate_search(&f, a, b, 4).map_err(|e| e.to_string())?;
            let expect = keys[i] == keys[j];
            if found.is_some() != expect {
                return Err(format!("disagree on {} ~ {}", f.show(a), f.show(b)));
            }
            if let Some(w) = found {
                ensure(f.oracle.conjugate(a, &w.t) == *b, "witness does not verify")?;
                conjugate += 1;
            }
            pairs += 1;
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{pairs} pairs agree ({conjugate} conjugate) in {:.1?}",
        start.elapsed()
    ))
}

fn hyperbolic(g: &Group, e: &ElementId) -> bool {
    !g.oracle.is_identity(e) && is_parabolic(g, e, 3).unwrap().is_none()
}

fn c9() -> Outcome {
    let f = presets::f2relx();
    let xy = f.element("x y").unwrap();
    let t = translation_number(&f, &xy, 16).map_err(|e| e.to_string())?;
    let two = Ratio::from_integer(2);
    ensure(
        t.terms.iter().all(|&r| r == two),
        format!("τ̂(xy) terms {:?}", t.terms),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ball = f.oracle.enumerate_x_ball(4, DEFAULT_VERTEX_CAP).unwrap();
    for _ in 0..20 {
        let s = &ball[rng.gen_range(0..ball.len())];
        let c = f.oracle.conjugate(&xy, s);
        for n in 1..=8 {
            let tc = translation_number(&f, &c, n).map_err(|e| e.to_string())?;
            ensure(
                tc.last() == two,
                format!("τ̂_{n} of conjugate by {} is {}", f.show(s), tc.last()),
            )?;
        }
    }
    let mut mins = Vec::new();
    for g in [presets::f2relx(), presets::fp23()] {
        let ball = g.oracle.enumerate_x_ball(3, DEFAULT_VERTEX_CAP).unwrap();
        let mut min: Option<Ratio<i64>> = None;
        let mut count = 0;
        for e in ball.iter().filter(|e| hyperbolic(&g, e)) {
            let t = translation_number(&g, e, 8)
                .map_err(|e| e.to_string())?
                .last();
            min = Some(min.map_or(t, |m| m.min(t)));
            count += 1;
        }
        let min = min.ok_or("no hyperbolic elements")?;
        ensure(min >= Ratio::from_integer(1), format!("min τ̂_8 = {min}"))?;
        mins.push(format!("{min} over {count}"));
    }
    Ok(format!(
        "τ̂_N(xy) = 2 for N ≤ 16; 20 conjugates invariant; gap min τ̂_8 {}",
        mins.join(", ")
    ))
}

fn c10() -> Outcome {
    let f = presets::f2relx();
    let w = is_parabolic(&f, &f.element("y x^5 y^-1").unwrap(), 1)
        .unwrap()
        .ok_or("no witness for y x^5 y^-1")?;
    let slot = &f.pres.subgroups[w.lambda];
    ensure(
        f.show(&w.t) == "y" && slot.name == "H" && w.image == 5,
        format!("witness ({}, {}, {})", f.show(&w.t), slot.name, w.image),
    )?;
    ensure(
        is_parabolic(&f, &f.element("y").unwrap(), 3)
            .unwrap()
            .is_none(),
        "y reported parabolic",
    )?;
    Ok("(y, H, x^5); y not found within radius 3".into())
}

fn c11() -> Outcome {
    let fp = presets::fp23();
    let s = enumerate_atomic_cycles(&fp, 6, 1).map_err(|e| e.to_string())?;
    ensure(
        s.essential().count() == 0,
        "fp23 has an essential atomic cycle",
    )?;
    let z = presets::zz();
    let cap = 5;
    let s = enumerate_atomic_cycles(&z, 4, cap).map_err(|e| e.to_string())?;
    let essential: HashSet<&str> = s.essential().map(|c| c.label.as_str()).collect();
    for k in 1..=cap {
        let want = canonical_label(&z, &format!("@H(a^{k}) b @H(a^-{k}) b^-1")).unwrap();
        ensure(essential.contains(want.as_str()), format!("missing {want}"))?;
    }
    Ok(format!(
        "fp23: {} atomic cycles, none essential; zz: family present for k ≤ {cap} ({} essential)",
        enumerate_atomic_cycles(&fp, 6, 1).unwrap().cycles.len(),
        essential.len()
    ))
}

/// Mutations that cannot verify: out-of-range positions or relators, a
/// dropped step from a minimal certificate, a relator with a different
/// abelianized image, a tampered start word, a nonempty final word.
fn mutations(
    g: &Group,
    w: &Word,
    cert: &AreaCertificate,
    rng: &mut ChaCha8Rng,
) -> Vec<AreaCertificate> {
    let sym = g.pres.symmetrized();
    let mut out = Vec::new();
    let mut cur = cert.start.clone();
    for (i, s) in cert.steps.iter().enumerate() {
        let mut m = cert.clone();
        m.steps[i].position = cur.len() + 1 + rng.gen_range(0..5);
        out.push(m);
        let mut m = cert.clone();
        m.steps[i].relator = sym.len() + rng.gen_range(0..5);
        out.push(m);
        let mut m = cert.clone();
        m.steps.remove(i);
        out.push(m);
        let image = |r: &Word| {
            let mut v = vec![0i64; g.pres.generators.len()];
            for l in r {
                if let rhgt::Letter::Gen { index, inverse } = l {
                    v[*index as usize] += if *inverse { -1 } else { 1 };
                }
            }
            v
        };
        let here = image(&sym[s.relator]);
        let others: Vec<usize> = (0..sym.len()).filter(|&r| image(&sym[r]) != here).collect();
        if !others.is_empty() {
            let mut m = cert.clone();
            m.steps[i] = Step {
                relator: others[rng.gen_range(0..others.len())],
                position: s.position,
            };
            out.push(m);
        }
        cur = rhgt::filling::apply_step(&g.pres, &cur, &sym[s.relator], s.position);
    }
    let mut m = cert.clone();
    m.start = g.pres.free_reduce(&w.concat(&g.parse("b").unwrap()));
    out.push(m);
    let mut m = cert.clone();
    m.final_word = g.parse("b").unwrap();
    out.push(m);
    out
}

fn c12() -> Outcome {
    let z = presets::zz();
    let mut certs: Vec<(Word, AreaCertificate)> =
        zz_corpus().into_iter().map(|(w, _, c)| (w, c)).collect();
    for n in 1..=5 {
        let w = z.parse(&commutator(n)).unwrap();
        certs.push((w.clone(), area_with_cert(&z, &w, 6).unwrap().1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mutated = 0;
    for (w, c) in &certs {
        ensure(
            verify_certificate(&z.pres, w, c),
            format!("{} does not verify", z.format(w)),
        )?;
        let json = c.to_json(&z.pres);
        let back = AreaCertificate::from_json(&z.pres, json).map_err(|e| e.to_string())?;
        ensure(
            verify_certificate(&z.pres, w, &back),
            "round-tripped certificate fails",
        )?;
        for m in mutations(&z, w, c, &mut rng) {
            ensure(
                !verify_certificate(&z.pres, w, &m),
                format!("mutation of {} verifies", z.format(w)),
            )?;
            mutated += 1;
        }
    }
    Ok(format!(
        "{} certificates verify; {mutated} mutations all rejected",
        certs.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("commutator length and area in zz", c1),
        ("coset penetration negative control", c2),
        ("coset penetration positive control", c3),
        ("geodesic components are isolated", c4),
        ("component report in bs12", c5),
        ("Ω-length bound on zz cycles", c6),
        ("Dehn scan contrast", c7),
        ("conjugacy search agrees with cyclic reduction", c8),
        ("translation numbers", c9),
        ("parabolicity search", c10),
        ("atomic cycles", c11),
        ("certificate soundness", c12),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if filter.is_some_and(|n| n != i + 1) {
            continue;
        }
        let t = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{:.1?}]",
                i + 1,
                t.elapsed()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {why} [{:.1?}]",
                    i + 1,
                    t.elapsed()
                );
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
