use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::presentation::{OmegaSets, RelPresentation, SubgroupSlot};
use crate::word::Word;

use super::base::{BaseGroup, BaseKind};
use super::oracle::{ElementId, GroupOracle, ZooOracle, DEFAULT_VERTEX_CAP};

/// A group definition file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub subgroups: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<String>,
    #[serde(default, skip_serializing_if = "GroupOptions::is_empty")]
    pub options: GroupOptions,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_in_x: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_cap: Option<usize>,
}

impl GroupOptions {
    fn is_empty(&self) -> bool {
        *self == GroupOptions::default()
    }
}

/// One entry of the `subgroups` object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupSpec {
    pub kind: String,
    pub params: SubgroupParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupParams {
    /// Generator as a word over the base generators.
    pub generator: String,
    /// Internal generator name used inside `@Name(...)` tokens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn subgroup_specs(&self) -> Result<Vec<(String, SubgroupSpec)>> {
        self.subgroups
            .iter()
            .map(|(name, v)| Ok((name.clone(), serde_json::from_value(v.clone())?)))
            .collect()
    }
}

/// A relative presentation bundled with its oracle.
#[derive(Clone)]
pub struct Group {
    pub pres: RelPresentation,
    pub oracle: Arc<dyn GroupOracle>,
    pub omega: OmegaSets,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("generators", &self.pres.generators)
            .field("subgroups", &self.pres.subgroups)
            .field("relators", &self.pres.relators().len())
            .finish()
    }
}

impl Group {
    pub fn parse(&self, text: &str) -> Result<Word> {
        self.pres.parse_word(text)
    }

    pub fn format(&self, w: &Word) -> String {
        self.pres.format_word(w)
    }

    /// Parses a word and evaluates it.
    pub fn element(&self, text: &str) -> Result<ElementId> {
        self.oracle.normal_form(&self.parse(text)?)
    }

    pub fn show(&self, g: &ElementId) -> String {
        self.oracle.format_element(g)
    }
}

fn base_kind(cfg: &GroupConfig) -> Result<BaseKind> {
    let o = &cfg.options;
    let base = match cfg.kind.as_str() {
        "relpres" => o
            .base
            .as_deref()
            .ok_or_else(|| Error::Config("relpres needs options.base".into()))?,
        "free_rel_cyclic" => "free",
        k => {
            if o.base.is_some() {
                return Err(Error::Config(format!(
                    "options.base is not allowed for kind `{k}`"
                )));
            }
            k
        }
    };
    Ok(match base {
        "free" => BaseKind::Free {
            rank: o.rank.unwrap_or(2),
        },
        "free_product" => BaseKind::FreeProduct {
            orders: o
                .orders
                .clone()
                .ok_or_else(|| Error::Config("free_product needs options.orders".into()))?,
        },
        "zz" => BaseKind::Zz,
        "bs" => BaseKind::Bs {
            n: o.n.unwrap_or(2),
        },
        other => return Err(Error::Unsupported(format!("group kind `{other}`"))),
    })
}

/// Fills in the standard presentation for kinds that have one.
fn with_defaults(cfg: &GroupConfig, base: &BaseGroup) -> Result<GroupConfig> {
    let mut cfg = cfg.clone();
    let names = &base.names;
    let sub = |gen: &str| serde_json::json!({"kind": "cyclic", "params": {"generator": gen}});
    let bare = cfg.generators.is_empty() && cfg.subgroups.is_empty() && cfg.relators.is_empty();
    match (&base.kind, cfg.kind.as_str()) {
        (BaseKind::Zz, "zz") if bare => {
            cfg.generators = vec![names[1].clone()];
            cfg.subgroups.insert("H".into(), sub(&names[0]));
            cfg.relators = vec![format!(
                "@H({a}^-1) {b}^-1 @H({a}) {b}",
                a = names[0],
                b = names[1]
            )];
        }
        (BaseKind::Bs { n }, "bs") if bare => {
            cfg.generators = vec![names[1].clone()];
            cfg.subgroups.insert("H".into(), sub(&names[0]));
            cfg.relators = vec![format!(
                "{t}^-1 @H({a}) {t} @H({a}^-{n})",
                a = names[0],
                t = names[1]
            )];
        }
        (BaseKind::FreeProduct { .. }, "free_product") if bare => {
            cfg.generators = names.clone();
            for (i, g) in names.iter().enumerate() {
                let h = ((b'A' + i as u8) as char).to_string();
                cfg.subgroups.insert(h.clone(), sub(g));
                cfg.relators.push(format!("@{h}({g}) {g}^-1"));
            }
        }
        (BaseKind::Free { .. }, "free_rel_cyclic") => {
            if cfg.generators.is_empty() {
                cfg.generators = names.clone();
            }
            if cfg.subgroups.is_empty() {
                cfg.subgroups.insert("H".into(), sub(&names[0]));
            }
            if cfg.subgroups.len() != 1 {
                return Err(Error::Config(
                    "free_rel_cyclic takes exactly one subgroup".into(),
                ));
            }
        }
        _ => {
            if cfg.generators.is_empty() {
                cfg.generators = names.clone();
            }
        }
    }
    Ok(cfg)
}

/// Builds the presentation and oracle described by `cfg`.
pub fn build_group(cfg: &GroupConfig) -> Result<Group> {
    let kind = base_kind(cfg)?;
    let base = BaseGroup::new(kind, cfg.options.base_names.clone())?;
    let cfg = with_defaults(cfg, &base)?;

    let mut gen_names = Vec::new();
    let mut gen_elems = Vec::new();
    for spec in &cfg.generators {
        let (name, word) = match spec.split_once('=') {
            Some((n, w)) => (n.trim().to_string(), w.trim().to_string()),
            None => (spec.trim().to_string(), spec.trim().to_string()),
        };
        if gen_names.contains(&name) {
            return Err(Error::Config(format!("duplicate generator `{name}`")));
        }
        let g = base.parse(&word)?;
        if g == base.identity() {
            return Err(Error::Config(format!("generator `{name}` is trivial")));
        }
        gen_names.push(name);
        gen_elems.push(g);
    }

    let mut slots = Vec::new();
    let mut subs = Vec::new();
    for (name, spec) in cfg.subgroup_specs()? {
        if spec.kind != "cyclic" {
            return Err(Error::Unsupported(format!("subgroup kind `{}`", spec.kind)));
        }
        let g = base.parse(&spec.params.generator)?;
        let cs = base.cyclic_subgroup(&g)?;
        let gen_name = match &spec.params.name {
            Some(n) => n.clone(),
            None if !spec.params.generator.trim().contains([' ', '^']) => {
                spec.params.generator.trim().to_string()
            }
            None => {
                return Err(Error::Config(format!(
                    "subgroup `{name}` needs params.name"
                )))
            }
        };
        slots.push(SubgroupSlot {
            name,
            gen_name,
            order: cs.order(),
        });
        subs.push(cs);
    }

    if cfg.kind == "free_rel_cyclic" && cfg.relators.is_empty() {
        let mut cfg2 = cfg.clone();
        let g = base.parse(&cfg.subgroup_specs()?[0].1.params.generator)?;
        let word = express_over(&base, &gen_names, &gen_elems, &g)
            .ok_or_else(|| Error::Config("cannot express the subgroup generator over X".into()))?;
        cfg2.relators = vec![format!(
            "@{}({}) {}",
            slots[0].name, slots[0].gen_name, word
        )];
        return build_group(&cfg2);
    }

    let cap = cfg.options.vertex_cap.unwrap_or(DEFAULT_VERTEX_CAP);
    let mut pres = RelPresentation::alphabet(gen_names.clone(), slots.clone());
    let mut relators: Vec<Word> = cfg
        .relators
        .iter()
        .map(|r| pres.parse_word(r))
        .collect::<Result<_>>()?;
    let probe = ZooOracle::new(base.clone(), gen_elems.clone(), subs.clone(), cap);
    for (r, text) in relators.iter().zip(&cfg.relators) {
        if !probe.is_identity(&probe.normal_form(r)?) {
            return Err(Error::Config(format!(
                "relator `{text}` is not trivial in the group"
            )));
        }
    }
    pres.set_relators(relators.clone());
    let omega = pres.compute_omega();

    if cfg.options.omega_in_x.unwrap_or(true) {
        let mut added = false;
        for (lambda, set) in omega.sets.iter().enumerate() {
            for &w in set {
                if w <= 0 {
                    continue;
                }
                let slot = &slots[lambda];
                let elem = probe.subgroup_element(lambda, w);
                let inv = probe.invert(&elem);
                if gen_elems.iter().any(|g| *g == elem || *g == inv) {
                    continue;
                }
                let mut name = if w == 1 {
                    slot.gen_name.clone()
                } else {
                    format!("{}{}", slot.gen_name, w)
                };
                while gen_names.contains(&name) {
                    name.push('\'');
                }
                gen_names.push(name.clone());
                gen_elems.push(elem);
                let text = format!(
                    "@{}({}) {}^-1",
                    slot.name,
                    crate::presentation::power(&slot.gen_name, w),
                    name
                );
                pres = RelPresentation::alphabet(gen_names.clone(), slots.clone());
                relators.push(pres.parse_word(&text)?);
                added = true;
            }
        }
        if added {
            pres = RelPresentation::alphabet(gen_names.clone(), slots.clone());
            pres.set_relators(relators);
        }
    }

    let oracle = ZooOracle::new(base, gen_elems, subs, cap);
    let omega = pres.compute_omega();
    Ok(Group {
        pres,
        oracle: Arc::new(oracle),
        omega,
    })
}

/// A word over `X` for `g` when every base generator occurring in `g` is an
/// element of `X` up to inversion.
fn express_over(
    base: &BaseGroup,
    names: &[String],
    elems: &[ElementId],
    g: &ElementId,
) -> Option<String> {
    let BaseKind::Free { .. } = base.kind else {
        return None;
    };
    let mut parts = Vec::new();
    for &l in &g.0 {
        let letter = base.gen_power((l.unsigned_abs() - 1) as usize, l.signum());
        let inv = base.invert(&letter);
        let (i, s) = elems.iter().enumerate().find_map(|(i, e)| {
            if *e == letter {
                Some((i, ""))
            } else if *e == inv {
                Some((i, "^-1"))
            } else {
                None
            }
        })?;
        parts.push(format!("{}{s}", names[i]));
    }
    // The relator is `@H(h) W⁻¹`.
    parts.reverse();
    Some(
        parts
            .into_iter()
            .map(|p| match p.strip_suffix("^-1") {
                Some(n) => n.to_string(),
                None => format!("{p}^-1"),
            })
            .collect::<Vec<_>>()
            .join(" "),
    )
}

/// The bundled example groups.
pub mod presets {
    use super::*;

    pub const ZZ: &str = include_str!("../../../../groups/zz.json");
    pub const F2RELX: &str = include_str!("../../../../groups/f2relx.json");
    pub const BS12: &str = include_str!("../../../../groups/bs12.json");
    pub const FP23: &str = include_str!("../../../../groups/fp23.json");
    pub const F2: &str = include_str!("../../../../groups/f2.json");

    pub const ALL: [(&str, &str); 5] = [
        ("zz", ZZ),
        ("f2relx", F2RELX),
        ("bs12", BS12),
        ("fp23", FP23),
        ("f2", F2),
    ];

    pub fn get(name: &str) -> Option<Group> {
        ALL.iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| build_group(&GroupConfig::from_json(text).unwrap()).unwrap())
    }

    pub fn zz() -> Group {
        get("zz").unwrap()
    }
    pub fn f2relx() -> Group {
        get("f2relx").unwrap()
    }
    pub fn bs12() -> Group {
        get("bs12").unwrap()
    }
    pub fn fp23() -> Group {
        get("fp23").unwrap()
    }
    pub fn f2() -> Group {
        get("f2").unwrap()
    }
}
