//! The `rhgt` command line.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Map, Value};

use crate::algos::{self, Membership, OrderResult, WordProblem};
use crate::error::{Error, Result};
use crate::filling::{
    self, AreaCaps, AreaCertificate, AreaOutcome, MoveSet, RowStatus, ScanOptions,
};
use crate::graph::{rel_distance, rel_geodesic, DistanceOptions, Path};
use crate::hypcheck::{self, BcpParams, Sample};
use crate::paths::analyze;
use crate::zoo::{build_group, presets, ElementId, Group, GroupConfig, DEFAULT_VERTEX_CAP};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(
    name = "rhgt",
    version,
    about = "Computations in relatively hyperbolic groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Common {
    /// Group file, or the name of a bundled group (zz, f2relx, bs12, fp23, f2).
    #[arg(long)]
    group: String,
    #[arg(long, value_enum, default_value = "json")]
    out: OutFormat,
}

#[derive(Args, Debug)]
struct WordArg {
    #[arg(long, short = 'w', allow_hyphen_values = true)]
    word: String,
}

#[derive(Args, Debug)]
struct PairArg {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    g: String,
}

#[derive(Args, Debug)]
struct CapsArg {
    #[arg(long, default_value_t = 8)]
    max_area: usize,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = 2_000_000)]
    max_states: usize,
    /// Try every insertion instead of only interacting ones.
    #[arg(long)]
    full_moves: bool,
}

impl CapsArg {
    fn caps(&self) -> AreaCaps {
        AreaCaps {
            max_area: self.max_area,
            max_len: self.max_len,
            max_states: self.max_states,
            moves: if self.full_moves {
                MoveSet::Full
            } else {
                MoveSet::Interacting
            },
        }
    }
}

#[derive(Args, Debug)]
struct SampleArg {
    /// Number of seeded samples; 0 scans exhaustively.
    #[arg(long, default_value_t = 0)]
    sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SampleArg {
    fn sample(&self) -> Sample {
        match self.sample {
            0 => Sample::Exhaustive,
            count => Sample::Seeded {
                count,
                seed: self.seed,
            },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Relative and X-length of an element.
    Length {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        /// Truncation radius for the fallback search.
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// A relative geodesic from 1 to an element.
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
    },
    /// Component report of a path from 1.
    Components {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
    },
    /// Free-product reduction of a word.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
    },
    /// The Ω sets, and Ω-lengths of the components of a word.
    Omega {
        #[command(flatten)]
        common: Common,
        #[arg(long, short = 'w', allow_hyphen_values = true)]
        word: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Relative area of a null word, with a certificate.
    Area {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[command(flatten)]
        caps: CapsArg,
        /// Check a certificate file instead of searching.
        #[arg(long)]
        verify: Option<std::path::PathBuf>,
    },
    /// Relative Dehn function estimates.
    DehnScan {
        #[command(flatten)]
        common: Common,
        #[arg(long = "N")]
        n: usize,
        /// Largest |k| for letters of infinite subgroups.
        #[arg(long, default_value_t = 3)]
        radius: i64,
        #[command(flatten)]
        caps: CapsArg,
    },
    /// Thinness of geodesic triangles.
    Delta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[command(flatten)]
        sample: SampleArg,
    },
    /// X-thinness of geodesic triangles and quadrilaterals.
    Nu {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[command(flatten)]
        sample: SampleArg,
    },
    /// Coset penetration conditions for a pair of paths, or a sampled scan.
    Bcp {
        #[command(flatten)]
        common: Common,
        /// Path label of p (from --p-base).
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        p_base: String,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        q_base: String,
        #[arg(long, default_value_t = 0)]
        threshold: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long, default_value = "0")]
        c: String,
        /// Radius of the scan's endpoint ball.
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[command(flatten)]
        sample: SampleArg,
    },
    /// Quasi-convexity of a subgroup given by generators.
    Qconvex {
        #[command(flatten)]
        common: Common,
        #[arg(long = "gen", allow_hyphen_values = true, required = true)]
        gens: Vec<String>,
        #[arg(long, default_value_t = 4)]
        radius: usize,
        #[command(flatten)]
        sample: SampleArg,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Word problem.
    Wp {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[command(flatten)]
        caps: CapsArg,
        #[arg(long)]
        verify: Option<std::path::PathBuf>,
    },
    /// Membership in a peripheral subgroup.
    Member {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        sub: String,
        /// Enumerate products of Ω-elements up to this length instead of
        /// asking the oracle.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Search for a conjugator into a peripheral subgroup.
    Parabolic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Check a conjugator instead of searching.
        #[arg(long, allow_hyphen_values = true)]
        verify: Option<String>,
    },
    /// Search for t with t⁻¹ f t = g.
    Conjugate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, allow_hyphen_values = true)]
        verify: Option<String>,
    },
    /// Minimal symmetric pair of geodesics for conjugate elements.
    Sympair {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Relative translation number estimates.
    Translation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long = "N", default_value_t = 8)]
        n: usize,
    },
    /// Order of an element.
    Order {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long, default_value_t = 64)]
        cap: u64,
    },
    /// Search for f and n ≥ 2 with fⁿ conjugate to the element.
    Root {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: WordArg,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Search for f^k conjugate to g^l.
    Powerconj {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pair: PairArg,
        #[arg(long, default_value_t = 3)]
        k_max: i64,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, allow_hyphen_values = true)]
        verify: Option<String>,
        /// Exponents `k,l` for --verify.
        #[arg(long, allow_hyphen_values = true)]
        exponents: Option<String>,
    },
    /// Atomic cycles up to a length.
    Atomic {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Largest |k| for letters of infinite subgroups.
        #[arg(long, default_value_t = 3)]
        radius: i64,
    },
}

/// Exit status and report of one command.
struct Outcome {
    definite: bool,
    body: Value,
}

impl Outcome {
    fn definite(body: Value) -> Self {
        Outcome {
            definite: true,
            body,
        }
    }

    fn unknown(body: Value) -> Self {
        Outcome {
            definite: false,
            body,
        }
    }
}

pub fn load_group(spec: &str) -> Result<Group> {
    let path = std::path::Path::new(spec);
    if path.exists() {
        return build_group(&GroupConfig::load(path)?);
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    presets::get(name)
        .ok_or_else(|| Error::Config(format!("no group file or bundled group named `{spec}`")))
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    s.parse()
        .map_err(|_| Error::Config(format!("not a rational number: `{s}`")))
}

fn ratio_str(r: Ratio<i64>) -> String {
    r.to_string()
}

fn caps_unknown(e: &Error) -> bool {
    matches!(
        e,
        Error::ExactnessUnavailable(_) | Error::VertexCap { .. } | Error::OutsideTruncation(..)
    )
}

fn certificate_json(group: &Group, area: usize, cert: &AreaCertificate) -> Value {
    json!({ "area": area, "certificate": cert.to_json(&group.pres) })
}

fn verify_file(group: &Group, word: &str, file: &std::path::Path) -> Result<Outcome> {
    let w = group.parse(word)?;
    let text = std::fs::read_to_string(file)?;
    let value: Value = serde_json::from_str(&text)?;
    let cert_value = value.get("certificate").cloned().unwrap_or(value);
    let valid = match AreaCertificate::from_json(&group.pres, cert_value) {
        Ok(cert) => filling::verify_certificate(&group.pres, &w, &cert),
        Err(_) => false,
    };
    Ok(Outcome::definite(json!({ "valid": valid })))
}

fn element(group: &Group, text: &str) -> Result<ElementId> {
    group.element(text)
}

fn name_of(c: &Command) -> &'static str {
    use Command::*;
    match c {
        Length { .. } => "length",
        Geodesic { .. } => "geodesic",
        Components { .. } => "components",
        Reduce { .. } => "reduce",
        Omega { .. } => "omega",
        Area { .. } => "area",
        DehnScan { .. } => "dehn-scan",
        Delta { .. } => "delta",
        Nu { .. } => "nu",
        Bcp { .. } => "bcp",
        Qconvex { .. } => "qconvex",
        Wp { .. } => "wp",
        Member { .. } => "member",
        Parabolic { .. } => "parabolic",
        Conjugate { .. } => "conjugate",
        Sympair { .. } => "sympair",
        Translation { .. } => "translation",
        Order { .. } => "order",
        Root { .. } => "root",
        Powerconj { .. } => "powerconj",
        Atomic { .. } => "atomic",
    }
}

fn execute(command: &Command) -> Result<Outcome> {
    use Command::*;
    let common = common_of(command);
    let group = load_group(&common.group)?;
    let g = &group;
    let o = &*group.oracle;
    let outcome = match command {
        Length { word, radius, .. } => {
            let e = element(g, &word.word)?;
            let d = rel_distance(
                g,
                &o.identity(),
                &e,
                &DistanceOptions {
                    radius: *radius,
                    vertex_cap: DEFAULT_VERTEX_CAP,
                },
            )?;
            let body = json!({
                "element": g.show(&e),
                "x_length": o.x_length(&e),
                "rel_length": d.value,
                "exact": d.exact,
                "radius": d.radius,
            });
            if d.exact {
                Outcome::definite(body)
            } else {
                Outcome::unknown(body)
            }
        }
        Geodesic { word, .. } => {
            let e = element(g, &word.word)?;
            let p = rel_geodesic(g, &o.identity(), &e)?;
            Outcome::definite(json!({
                "element": g.show(&e),
                "geodesic": g.format(&p.word),
                "length": p.len(),
            }))
        }
        Components { word, .. } => {
            let p = Path::parse(g, &word.word)?;
            Outcome::definite(analyze(g, &p).to_json(g))
        }
        Reduce { word, .. } => {
            let w = g.parse(&word.word)?;
            let r = g.pres.free_reduce(&w);
            Outcome::definite(json!({
                "reduced": g.format(&r),
                "length": r.len(),
                "cyclically_reduced": g.pres.is_cyclically_reduced(&r),
            }))
        }
        Omega { word, cap, .. } => {
            let mut sets = Map::new();
            for (l, slot) in g.pres.subgroups.iter().enumerate() {
                let vals: Vec<String> = g
                    .omega
                    .get(l)
                    .iter()
                    .map(|&e| crate::presentation::power(&slot.gen_name, e))
                    .collect();
                sets.insert(slot.name.clone(), json!(vals));
            }
            let violations: Vec<String> = g
                .pres
                .check_reduced()
                .iter()
                .map(|v| format!("{v:?}"))
                .collect();
            let mut body = json!({
                "omega": sets,
                "max_relator_len": g.pres.max_relator_len(),
                "violations": violations,
            });
            let mut definite = true;
            if let Some(w) = word {
                let p = Path::parse(g, w)?;
                let lengths: Vec<Value> = analyze(g, &p)
                    .components
                    .iter()
                    .map(|c| {
                        let len = g.pres.omega_length(&g.omega, c.lambda, c.value, *cap);
                        definite &= len.is_some();
                        json!(len)
                    })
                    .collect();
                body["omega_lengths"] = json!(lengths);
            }
            Outcome { definite, body }
        }
        Area {
            word, caps, verify, ..
        } => {
            if let Some(file) = verify {
                verify_file(g, &word.word, file)?
            } else {
                let w = g.parse(&word.word)?;
                match filling::rel_area(g, &w, &caps.caps())? {
                    AreaOutcome::Found { area, certificate } => {
                        Outcome::definite(certificate_json(g, area, &certificate))
                    }
                    AreaOutcome::NotFoundWithinCaps { states, cap_hit } => {
                        Outcome::unknown(json!({
                            "area": null,
                            "status": "not-found-within-caps",
                            "states": states,
                            "cap_hit": cap_hit,
                        }))
                    }
                }
            }
        }
        DehnScan {
            n, radius, caps, ..
        } => {
            let opts = ScanOptions {
                sub_radius: *radius,
                caps: caps.caps(),
                ..Default::default()
            };
            let t = filling::dehn_scan(g, *n, &opts)?;
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| json!({ "n": r.n, "area": r.area, "status": r.status.as_str(), "witness": r.witness }))
                .collect();
            let cap_hit = t.rows.iter().any(|r| r.status == RowStatus::CapHit);
            let body = json!({
                "rows": rows,
                "classes": t.classes,
                "sub_radius": radius,
                "slope": ratio_str(opts.slope),
                "csv": t.to_csv(),
            });
            Outcome {
                definite: !cap_hit,
                body,
            }
        }
        Delta { radius, sample, .. } => {
            Outcome::definite(hypcheck::estimate_delta(g, *radius, sample.sample())?.to_json())
        }
        Nu { radius, sample, .. } => Outcome::definite(serde_json::to_value(hypcheck::nu_scan(
            g,
            *radius,
            sample.sample(),
        )?)?),
        Bcp {
            p,
            p_base,
            q,
            q_base,
            threshold,
            k,
            lambda,
            c,
            radius,
            sample,
            ..
        } => {
            let params = BcpParams {
                lambda: parse_ratio(lambda)?,
                c: parse_ratio(c)?,
                k: *k,
            };
            match (p, q) {
                (Some(p), Some(q)) => {
                    let pp = Path::new(o, element(g, p_base)?, g.parse(p)?);
                    let qq = Path::new(o, element(g, q_base)?, g.parse(q)?);
                    let r = hypcheck::bcp_check(g, &pp, &qq, &params, *threshold)?;
                    Outcome::definite(serde_json::to_value(r)?)
                }
                (None, None) => {
                    let count = sample.sample.max(1);
                    let s = hypcheck::bcp_scan(g, *radius, *k, count, sample.seed, *threshold)?;
                    Outcome::definite(serde_json::to_value(s)?)
                }
                _ => return Err(Error::Config("--p and --q go together".into())),
            }
        }
        Qconvex {
            gens,
            radius,
            sample,
            cap,
            ..
        } => {
            let gens: Vec<ElementId> = gens.iter().map(|s| element(g, s)).collect::<Result<_>>()?;
            let r = hypcheck::quasiconvexity_scan(g, &gens, *radius, sample.sample(), *cap)?;
            let cap_hit = r.cap_hit;
            Outcome {
                definite: !cap_hit,
                body: serde_json::to_value(r)?,
            }
        }
        Wp {
            word, caps, verify, ..
        } => {
            if let Some(file) = verify {
                verify_file(g, &word.word, file)?
            } else {
                let w = g.parse(&word.word)?;
                match algos::generic_word_problem(g, &w, &caps.caps())? {
                    WordProblem::Trivial { area, certificate } => {
                        let mut body = certificate_json(g, area, &certificate);
                        body["answer"] = json!("trivial");
                        Outcome::definite(body)
                    }
                    WordProblem::NontrivialCertified { normal_form } => Outcome::definite(json!({
                        "answer": "nontrivial",
                        "normal_form": normal_form,
                    })),
                    WordProblem::UnknownBeyondCaps => {
                        Outcome::unknown(json!({ "answer": "unknown-beyond-caps" }))
                    }
                }
            }
        }
        Member {
            word, sub, radius, ..
        } => {
            let lambda = g
                .pres
                .subgroup_index(sub)
                .ok_or_else(|| Error::UnknownSubgroup(sub.clone()))?;
            let e = element(g, &word.word)?;
            let m = match radius {
                Some(r) => algos::membership_generic(g, lambda, &e, *r)?,
                None => algos::membership(g, lambda, &e),
            };
            let definite = m != Membership::UnknownBeyondCaps;
            Outcome {
                definite,
                body: serde_json::to_value(m)?,
            }
        }
        Parabolic {
            word,
            radius,
            verify,
            ..
        } => {
            let e = element(g, &word.word)?;
            if let Some(t) = verify {
                let c = o.conjugate(&e, &element(g, t)?);
                let hit = (0..o.num_subgroups()).find_map(|l| {
                    o.subgroup_membership(l, &c)
                        .map(|x| (g.pres.subgroups[l].name.clone(), x))
                });
                Outcome::definite(json!({ "valid": hit.is_some(), "subgroup": hit.map(|h| h.0) }))
            } else {
                match algos::is_parabolic(g, &e, *radius)? {
                    Some(w) => {
                        let slot = &g.pres.subgroups[w.lambda];
                        Outcome::definite(json!({
                            "answer": "parabolic",
                            "t": g.show(&w.t),
                            "subgroup": slot.name,
                            "image": crate::presentation::power(&slot.gen_name, w.image),
                        }))
                    }
                    None => Outcome::unknown(
                        json!({ "answer": "not-found-within-radius", "radius": radius }),
                    ),
                }
            }
        }
        Conjugate {
            pair,
            radius,
            verify,
            ..
        } => {
            let (f, h) = (element(g, &pair.f)?, element(g, &pair.g)?);
            if let Some(t) = verify {
                let valid = o.conjugate(&f, &element(g, t)?) == h;
                Outcome::definite(json!({ "valid": valid }))
            } else {
                match algos::conjugate_search(g, &f, &h, *radius)? {
                    Some(w) => Outcome::definite(json!({
                        "answer": "conjugate",
                        "t": g.show(&w.t),
                        "t_x_length": w.t_x_length,
                    })),
                    None => Outcome::unknown(
                        json!({ "answer": "not-found-within-radius", "radius": radius }),
                    ),
                }
            }
        }
        Sympair { pair, radius, .. } => {
            let (f, h) = (element(g, &pair.f)?, element(g, &pair.g)?);
            match algos::min_symmetric_pair(g, &f, &h, *radius)? {
                Some(sp) => {
                    let k = algos::synchronous_check(g, &sp.p, &sp.q)?;
                    Outcome::definite(json!({
                        "answer": "found",
                        "t": g.show(&sp.t),
                        "label": g.format(&sp.p.word),
                        "p_base": g.show(sp.p.start()),
                        "q_base": g.show(sp.q.start()),
                        "synchronous_components": sp.synchronous_components,
                        "kappa_hat": k.kappa_hat,
                    }))
                }
                None => Outcome::unknown(
                    json!({ "answer": "not-found-within-radius", "radius": radius }),
                ),
            }
        }
        Translation { word, n, .. } => {
            let e = element(g, &word.word)?;
            let t = algos::translation_number(g, &e, *n)?;
            Outcome::definite(json!({
                "element": t.element,
                "representative": t.representative,
                "tau_hat": ratio_str(t.last()),
                "terms": t.terms.iter().map(|r| ratio_str(*r)).collect::<Vec<_>>(),
                "raw_terms": t.raw_terms.iter().map(|r| ratio_str(*r)).collect::<Vec<_>>(),
            }))
        }
        Order { word, cap, .. } => {
            let e = element(g, &word.word)?;
            let r = algos::element_order(g, &e, *cap);
            let definite = !matches!(r, OrderResult::UnknownBeyondCap { .. });
            Outcome {
                definite,
                body: serde_json::to_value(r)?,
            }
        }
        Root {
            word,
            radius,
            n_max,
            ..
        } => {
            let e = element(g, &word.word)?;
            match algos::root_search(g, &e, *radius, *n_max)? {
                Some(r) => Outcome::definite(json!({
                    "answer": "found",
                    "f": g.show(&r.f),
                    "n": r.n,
                    "t": g.show(&r.t),
                })),
                None => Outcome::unknown(json!({ "answer": "not-found-within-caps" })),
            }
        }
        Powerconj {
            pair,
            k_max,
            radius,
            verify,
            exponents,
            ..
        } => {
            let (f, h) = (element(g, &pair.f)?, element(g, &pair.g)?);
            if let Some(t) = verify {
                let ex = exponents
                    .as_deref()
                    .ok_or_else(|| Error::Config("--verify needs --exponents k,l".into()))?;
                let (k, l) = ex
                    .split_once(',')
                    .and_then(|(a, b)| {
                        Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?))
                    })
                    .ok_or_else(|| Error::Config(format!("bad exponents `{ex}`")))?;
                let valid = o.conjugate(&o.power(&f, k), &element(g, t)?) == o.power(&h, l);
                Outcome::definite(json!({ "valid": valid }))
            } else {
                match algos::power_conjugacy_search(g, &f, &h, *k_max, *radius)? {
                    Some(p) => Outcome::definite(json!({
                        "answer": "found",
                        "k": p.k,
                        "l": p.l,
                        "t": g.show(&p.t),
                    })),
                    None => Outcome::unknown(json!({ "answer": "not-found-within-caps" })),
                }
            }
        }
        Atomic {
            max_len, radius, ..
        } => Outcome::definite(serde_json::to_value(algos::enumerate_atomic_cycles(
            g, *max_len, *radius,
        )?)?),
    };
    Ok(outcome)
}

fn render(name: &str, out: OutFormat, body: Value) -> String {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(name));
    match body {
        Value::Object(m) => map.extend(m),
        other => {
            map.insert("result".into(), other);
        }
    }
    match out {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("json");
            s.push('\n');
            s
        }
        OutFormat::Text => {
            if let Some(Value::String(csv)) = map.get("csv") {
                return csv.clone();
            }
            let mut s = String::new();
            for (k, v) in &map {
                match v {
                    Value::String(x) => s.push_str(&format!("{k}: {x}\n")),
                    other => s.push_str(&format!("{k}: {other}\n")),
                }
            }
            s
        }
    }
}

/// Runs one command; returns the exit status (0 definite, 2 unknown within
/// caps, 1 usage or input error).
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let name = name_of(&cli.command);
    let out = common_of(&cli.command).out;
    match execute(&cli.command) {
        Ok(outcome) => {
            let _ = stdout.write_all(render(name, out, outcome.body).as_bytes());
            if outcome.definite {
                0
            } else {
                2
            }
        }
        Err(e) if caps_unknown(&e) => {
            let _ = writeln!(stderr, "rhgt: {e}");
            let body = json!({ "status": "unknown", "reason": e.to_string() });
            let _ = stdout.write_all(render(name, out, body).as_bytes());
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "rhgt: {e}");
            1
        }
    }
}

fn common_of(c: &Command) -> &Common {
    use Command::*;
    match c {
        Length { common, .. }
        | Geodesic { common, .. }
        | Components { common, .. }
        | Reduce { common, .. }
        | Omega { common, .. }
        | Area { common, .. }
        | DehnScan { common, .. }
        | Delta { common, .. }
        | Nu { common, .. }
        | Bcp { common, .. }
        | Qconvex { common, .. }
        | Wp { common, .. }
        | Member { common, .. }
        | Parabolic { common, .. }
        | Conjugate { common, .. }
        | Sympair { common, .. }
        | Translation { common, .. }
        | Order { common, .. }
        | Root { common, .. }
        | Powerconj { common, .. }
        | Atomic { common, .. } => common,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
