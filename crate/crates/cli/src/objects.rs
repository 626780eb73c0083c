//! Library objects built from spec blocks.

use std::f64::consts::PI;

use difgeo::curvebuild::{IntrinsicSpec, ScalarFn};
use difgeo::curves::CurveSpec;
use difgeo::surfaces::{Builtin, SurfaceSpec};

use crate::specfile::{Block, BlockKind, SpecError};

#[derive(Debug, Clone)]
pub enum Object {
    Curve(CurveSpec),
    Surface(SurfaceSpec),
    Intrinsic(IntrinsicSpec),
}

/// Named parameters of each builtin, in the positional order `Builtin::from_name` takes.
pub fn builtin_params(name: &str) -> &'static [&'static str] {
    match name {
        "sphere" => &["radius"],
        "cylinder" => &["radius", "height"],
        "torus" => &["major", "minor"],
        "catenoid" => &["c", "half_height"],
        "helicoid" => &["c", "half_width"],
        "pseudosphere" => &["s_max"],
        "saddle" => &["a", "half_width"],
        _ => &[],
    }
}

/// Parses one expression key on its own so errors point at its line.
fn expr(b: &Block, key: &str, vars: &[&str]) -> Result<Option<String>, SpecError> {
    let Some(text) = b.expr_text(key)? else { return Ok(None) };
    difgeo::Expr::parse(&text, vars).map_err(|e| b.lib_error(key, e))?;
    Ok(Some(text))
}

pub fn build(block: &Block) -> Result<Object, SpecError> {
    match block.kind {
        BlockKind::Curve => curve(block).map(Object::Curve),
        BlockKind::Surface => surface(block).map(Object::Surface),
        BlockKind::Intrinsic => intrinsic(block).map(Object::Intrinsic),
        BlockKind::Task => Err(block.error(block.line, format!("`{}` is a task, not an object", block.name))),
    }
}

fn curve(b: &Block) -> Result<CurveSpec, SpecError> {
    b.only(&["x", "y", "z", "t", "closed"])?;
    let x = b.require("x", expr(b, "x", &["t"])?)?;
    let y = b.require("y", expr(b, "y", &["t"])?)?;
    let z = expr(b, "z", &["t"])?;
    let (t0, t1) = b.require("t", b.pair("t")?)?;
    let closed = b.boolean("closed")?.unwrap_or(false);
    let built = match z {
        Some(z) => CurveSpec::analytic(&x, &y, &z, t0, t1, closed),
        None => CurveSpec::plane(&x, &y, t0, t1, closed),
    };
    built.map_err(|e| b.lib_error("x", e))
}

fn surface(b: &Block) -> Result<SurfaceSpec, SpecError> {
    let flip = b.boolean("flip_normal")?.unwrap_or(false);
    let s = if let Some(name) = b.text("builtin")? {
        let names = builtin_params(&name);
        if names.is_empty() {
            return Err(b.lib_error("builtin", format!("unknown builtin (one of {})", Builtin::NAMES.join(", "))));
        }
        let mut allowed = vec!["builtin", "params", "flip_normal"];
        allowed.extend_from_slice(names);
        b.only(&allowed)?;
        let params = match b.list("params")? {
            Some(p) => {
                if names.iter().any(|k| b.has(k)) {
                    return Err(b.lib_error("params", "give either `params` or named parameters, not both"));
                }
                p
            }
            None => {
                let mut p = Vec::new();
                for (i, k) in names.iter().enumerate() {
                    match b.num(k)? {
                        Some(x) if p.len() == i => p.push(x),
                        Some(_) => return Err(b.lib_error(k, format!("needs `{}` as well", names[i - 1]))),
                        None => {}
                    }
                }
                p
            }
        };
        let builtin = Builtin::from_name(&name, &params).map_err(|e| b.lib_error("builtin", e))?;
        SurfaceSpec::builtin(builtin)
    } else if b.has("graph") {
        b.only(&["graph", "u", "v", "flip_normal"])?;
        let f = b.require("graph", expr(b, "graph", &["x", "y"])?)?;
        let u = b.require("u", b.pair("u")?)?;
        let v = b.require("v", b.pair("v")?)?;
        SurfaceSpec::graph(&f, u, v).map_err(|e| b.lib_error("graph", e))?
    } else if b.has("profile_x") || b.has("profile_y") {
        b.only(&["profile_x", "profile_y", "u", "v", "flip_normal"])?;
        let px = b.require("profile_x", expr(b, "profile_x", &["s"])?)?;
        let py = b.require("profile_y", expr(b, "profile_y", &["s"])?)?;
        let u = b.require("u", b.pair("u")?)?;
        let v = b.pair("v")?.unwrap_or((-PI, PI));
        SurfaceSpec::revolution(&px, &py, u, v).map_err(|e| b.lib_error("profile_x", e))?
    } else {
        b.only(&["x", "y", "z", "u", "v", "flip_normal"])?;
        let x = b.require("x", expr(b, "x", &["u", "v"])?)?;
        let y = b.require("y", expr(b, "y", &["u", "v"])?)?;
        let z = b.require("z", expr(b, "z", &["u", "v"])?)?;
        let u = b.require("u", b.pair("u")?)?;
        let v = b.require("v", b.pair("v")?)?;
        SurfaceSpec::parametric(&x, &y, &z, u, v).map_err(|e| b.lib_error("x", e))?
    };
    Ok(if flip { s.with_flipped_normal() } else { s })
}

fn intrinsic(b: &Block) -> Result<IntrinsicSpec, SpecError> {
    b.only(&["kappa", "tau", "length", "s"])?;
    let kappa = b.require("kappa", expr(b, "kappa", &["s"])?)?;
    let kappa = ScalarFn::parse(&kappa).map_err(|e| b.lib_error("kappa", e))?;
    let (s0, s1) = match (b.num("length")?, b.pair("s")?) {
        (Some(_), Some(_)) => return Err(b.lib_error("s", "give either `length` or `s`, not both")),
        (Some(l), None) => (0.0, l),
        (None, Some(s)) => s,
        (None, None) => return Err(b.error(b.line, format!("intrinsic `{}` needs `length` or `s`", b.name))),
    };
    if !(s1 > s0) {
        return Err(b.lib_error(if b.has("s") { "s" } else { "length" }, "arc-length interval is empty"));
    }
    Ok(match b.expr_text("tau")? {
        Some(tau) => IntrinsicSpec::space(kappa, ScalarFn::parse(&tau).map_err(|e| b.lib_error("tau", e))?, s0, s1),
        None => IntrinsicSpec::plane(kappa, s0, s1),
    })
}
