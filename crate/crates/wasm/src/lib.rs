//! Browser bindings: component reports, geodesics and area certificates for
//! the bundled groups, as JSON strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rhgt::filling::{
    apply_step, rel_area, verify_certificate, AreaCaps, AreaCertificate, AreaOutcome,
};
use rhgt::graph::{exact_rel_length, rel_geodesic, Path};
use rhgt::paths::analyze;
use rhgt::zoo::presets;
use rhgt::Group;

fn group(name: &str) -> Result<Group, String> {
    presets::get(name).ok_or_else(|| format!("unknown group `{name}`"))
}

fn path_json(g: &Group, p: &Path) -> Value {
    let letters: Vec<String> = p.word.iter().map(|&l| g.pres.format_letter(l)).collect();
    let vertices: Vec<String> = p.vertices.iter().map(|v| g.show(v)).collect();
    json!({ "word": g.format(&p.word), "letters": letters, "vertices": vertices })
}

pub fn groups_json() -> String {
    let list: Vec<Value> = presets::ALL
        .iter()
        .map(|(name, _)| {
            let g = presets::get(name).unwrap();
            json!({
                "name": name,
                "generators": g.pres.generators,
                "subgroups": g.pres.subgroups.iter().map(|s| format!("{} = <{}>", s.name, s.gen_name)).collect::<Vec<_>>(),
                "relators": g.pres.relators().iter().map(|r| g.format(r)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(list).to_string()
}

pub fn components_json(name: &str, word: &str) -> Result<String, String> {
    let g = group(name)?;
    let p = Path::parse(&g, word).map_err(|e| e.to_string())?;
    let mut report = analyze(&g, &p).to_json(&g);
    report["path"] = path_json(&g, &p);
    Ok(report.to_string())
}

pub fn geodesic_json(name: &str, word: &str) -> Result<String, String> {
    let g = group(name)?;
    let o = &*g.oracle;
    let target = g.element(word).map_err(|e| e.to_string())?;
    let p = rel_geodesic(&g, &o.identity(), &target).map_err(|e| e.to_string())?;
    let report = analyze(&g, &p).to_json(&g);
    Ok(json!({
        "element": g.show(&target),
        "x_length": o.x_length(&target),
        "rel_length": exact_rel_length(&g, &target),
        "path": path_json(&g, &p),
        "components": report,
    })
    .to_string())
}

pub fn area_json(name: &str, word: &str, max_area: usize) -> Result<String, String> {
    let g = group(name)?;
    let w = g.parse(word).map_err(|e| e.to_string())?;
    match rel_area(&g, &w, &AreaCaps::with_max_area(max_area)).map_err(|e| e.to_string())? {
        AreaOutcome::Found { area, certificate } => {
            let sym = g.pres.symmetrized();
            let mut cur = certificate.start.clone();
            let mut trace = vec![json!({ "word": g.format(&cur) })];
            for s in &certificate.steps {
                cur = apply_step(&g.pres, &cur, &sym[s.relator], s.position);
                trace.push(json!({
                    "relator": g.format(&sym[s.relator]),
                    "position": s.position,
                    "word": g.format(&cur),
                }));
            }
            Ok(json!({
                "area": area,
                "certificate": certificate.to_json(&g.pres),
                "trace": trace,
            })
            .to_string())
        }
        AreaOutcome::NotFoundWithinCaps { states, .. } => {
            Ok(json!({ "area": null, "states": states }).to_string())
        }
    }
}

pub fn verify_json(name: &str, word: &str, certificate: &str) -> Result<bool, String> {
    let g = group(name)?;
    let w = g.parse(word).map_err(|e| e.to_string())?;
    let value: Value = serde_json::from_str(certificate).map_err(|e| e.to_string())?;
    let cert = AreaCertificate::from_json(&g.pres, value).map_err(|e| e.to_string())?;
    Ok(verify_certificate(&g.pres, &w, &cert))
}

#[wasm_bindgen]
pub fn groups() -> String {
    groups_json()
}

#[wasm_bindgen]
pub fn components(group: &str, word: &str) -> Result<String, JsValue> {
    components_json(group, word).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn geodesic(group: &str, word: &str) -> Result<String, JsValue> {
    geodesic_json(group, word).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn area(group: &str, word: &str, max_area: usize) -> Result<String, JsValue> {
    area_json(group, word, max_area).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn verify(group: &str, word: &str, certificate: &str) -> Result<bool, JsValue> {
    verify_json(group, word, certificate).map_err(|e| JsValue::from_str(&e))
}
