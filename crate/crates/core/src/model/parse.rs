//! Line-oriented model-file parser and canonical serializer.
//!
//! Records:
//! ```text
//! link <name> parent=<name|world> joint=<free|revolute|prismatic|fixed> axis=<x,y,z>
//!      pos=<x,y,z> quat=<w,x,y,z> mass=<kg> com=<x,y,z> inertia=<ixx,iyy,izz,ixy,ixz,iyz>
//!      [limits=<lo,hi>] [damping=<d>] [actuated] [couple=<group>:<ratio>]
//!      [stiffness=<k>] [adamping=<d>] [taumax=<t>] [grip=<open>:<closed>]
//! geom <link|world> shape=<sphere|capsule|cylinder|box> size=<...> pos=<...> quat=<...> material=<name>
//! material <name> stiffness=<N/m> damping=<N*s/m> friction=<mu>
//! ```
//! `#` starts a comment. Floats serialize as the shortest decimal that parses
//! back to the same value, so serialize/parse round-trips are exact.

use super::{
    Coupling, GeomDef, JointDef, JointKind, LinkDef, ModelDef, ModelError, Shape, DEFAULT_TAU_MAX,
};
use crate::contact::Material;
use crate::spatial::{Mat3, Pose, SpatialInertia, UnitQuat, Vec3};
use std::fmt::Write as _;

/// A whitespace-separated token with its 1-based position.
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Syntax { line, col, msg: msg.into() }
}

fn tokenize(line: &str, line_no: usize) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut toks = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok { text: &body[s..i], line: line_no, col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok { text: &body[s..], line: line_no, col: s + 1 });
    }
    toks
}

fn parse_f64(tok: &Tok, text: &str, offset: usize) -> Result<f64, ModelError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(tok.line, tok.col + offset, format!("invalid number `{text}`"))),
    }
}

fn parse_floats<const N: usize>(tok: &Tok, value: &str) -> Result<[f64; N], ModelError> {
    let mut out = [0.0; N];
    let mut count = 0;
    let mut offset = 0;
    for part in value.split(',') {
        if count >= N {
            return Err(syntax(tok.line, tok.col, format!("expected {N} comma-separated numbers")));
        }
        out[count] = parse_f64(tok, part, offset)?;
        count += 1;
        offset += part.len() + 1;
    }
    if count != N {
        return Err(syntax(tok.line, tok.col, format!("expected {N} comma-separated numbers")));
    }
    Ok(out)
}

/// Fields shared by `link` and `geom` records.
struct KeyValues<'a> {
    pairs: Vec<(Tok<'a>, &'a str)>,
    flags: Vec<Tok<'a>>,
}

fn split_key_values<'a>(toks: &'a [Tok<'a>]) -> KeyValues<'a> {
    let mut kv = KeyValues { pairs: Vec::new(), flags: Vec::new() };
    for t in toks {
        match t.text.split_once('=') {
            Some((k, v)) => kv.pairs.push((Tok { text: k, line: t.line, col: t.col }, v)),
            None => kv.flags.push(Tok { text: t.text, line: t.line, col: t.col }),
        }
    }
    kv
}

struct LinkRecord {
    def: LinkDef,
    line: usize,
}

#[derive(Default)]
struct Builder {
    links: Vec<LinkRecord>,
    materials: Vec<(String, Material, usize)>,
    static_geoms: Vec<GeomDef>,
    // (owner link name or "world", geom, line)
    geoms: Vec<(String, GeomDef, usize)>,
}

pub fn parse_model(text: &str) -> Result<ModelDef, ModelError> {
    let mut b = Builder::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(raw, line_no);
        if toks.is_empty() {
            continue;
        }
        match toks[0].text {
            "link" => parse_link(&mut b, &toks)?,
            "geom" => parse_geom(&mut b, &toks)?,
            "material" => parse_material(&mut b, &toks)?,
            other => {
                return Err(syntax(
                    line_no,
                    toks[0].col,
                    format!("unknown record `{other}` (expected link, geom, or material)"),
                ))
            }
        }
    }
    assemble(b)
}

fn parse_link(b: &mut Builder, toks: &[Tok]) -> Result<(), ModelError> {
    let head = &toks[0];
    if toks.len() < 2 || toks[1].text.contains('=') {
        return Err(syntax(head.line, head.col, "link record needs a name"));
    }
    let name = toks[1].text.to_string();
    let kv = split_key_values(&toks[2..]);

    let mut parent: Option<String> = None;
    let mut kind: Option<JointKind> = None;
    let mut axis = Vec3::z();
    let mut axis_given = false;
    let mut pos = Vec3::zeros();
    let mut quat = UnitQuat::IDENTITY;
    let mut mass: Option<f64> = None;
    let mut com = Vec3::zeros();
    let mut inertia: Option<Mat3> = None;
    let mut joint = JointDef::new(&name, JointKind::Fixed);

    for (k, v) in &kv.pairs {
        match k.text {
            "parent" => parent = Some(v.to_string()),
            "joint" => {
                kind = Some(match *v {
                    "free" => JointKind::Free,
                    "revolute" => JointKind::Revolute,
                    "prismatic" => JointKind::Prismatic,
                    "fixed" => JointKind::Fixed,
                    other => {
                        return Err(syntax(k.line, k.col, format!("unknown joint kind `{other}`")))
                    }
                })
            }
            "axis" => {
                let a = parse_floats::<3>(k, v)?;
                axis = Vec3::new(a[0], a[1], a[2]);
                axis_given = true;
            }
            "pos" => {
                let p = parse_floats::<3>(k, v)?;
                pos = Vec3::new(p[0], p[1], p[2]);
            }
            "quat" => quat = parse_quat(k, v)?,
            "mass" => mass = Some(parse_f64(k, v, k.text.len() + 1)?),
            "com" => {
                let c = parse_floats::<3>(k, v)?;
                com = Vec3::new(c[0], c[1], c[2]);
            }
            "inertia" => {
                let i = parse_floats::<6>(k, v)?;
                inertia = Some(Mat3::new(
                    i[0], i[3], i[4], i[3], i[1], i[5], i[4], i[5], i[2],
                ));
            }
            "limits" => {
                let l = parse_floats::<2>(k, v)?;
                joint.limits = Some((l[0], l[1]));
            }
            "damping" => joint.damping = parse_f64(k, v, k.text.len() + 1)?,
            "stiffness" => joint.stiffness = parse_f64(k, v, k.text.len() + 1)?,
            "adamping" => joint.servo_damping = parse_f64(k, v, k.text.len() + 1)?,
            "taumax" => joint.tau_max = parse_f64(k, v, k.text.len() + 1)?,
            "couple" => {
                let (group, ratio) = v.split_once(':').ok_or_else(|| {
                    syntax(k.line, k.col, "couple expects <group>:<ratio>")
                })?;
                joint.coupling = Some(Coupling {
                    group: group.to_string(),
                    ratio: parse_f64(k, ratio, k.text.len() + 1 + group.len() + 1)?,
                });
            }
            "grip" => {
                let (open, closed) = v.split_once(':').ok_or_else(|| {
                    syntax(k.line, k.col, "grip expects <open>:<closed>")
                })?;
                joint.grip = Some((
                    parse_f64(k, open, k.text.len() + 1)?,
                    parse_f64(k, closed, k.text.len() + 1 + open.len() + 1)?,
                ));
            }
            other => return Err(syntax(k.line, k.col, format!("unknown link key `{other}`"))),
        }
    }
    for f in &kv.flags {
        match f.text {
            "actuated" => joint.actuated = true,
            other => return Err(syntax(f.line, f.col, format!("unknown link flag `{other}`"))),
        }
    }

    let kind = kind.ok_or_else(|| syntax(head.line, head.col, "link record needs joint=<kind>"))?;
    let mass = mass.ok_or_else(|| syntax(head.line, head.col, "link record needs mass=<kg>"))?;
    let inertia = inertia
        .ok_or_else(|| syntax(head.line, head.col, "link record needs inertia=<6 values>"))?;
    if matches!(kind, JointKind::Revolute | JointKind::Prismatic) && !axis_given {
        return Err(syntax(head.line, head.col, "revolute/prismatic joints need axis=<x,y,z>"));
    }
    let parent =
        parent.ok_or_else(|| syntax(head.line, head.col, "link record needs parent=<name|world>"))?;

    joint.kind = kind;
    joint.axis = axis;
    let parent_idx = if parent == "world" {
        None
    } else {
        match b.links.iter().position(|l| l.def.name == parent) {
            Some(i) => Some(i),
            None => {
                return Err(syntax(
                    head.line,
                    head.col,
                    format!("link `{name}` parent `{parent}` is not declared above it"),
                ))
            }
        }
    };
    b.links.push(LinkRecord {
        def: LinkDef {
            name,
            parent: parent_idx,
            joint,
            joint_pose: Pose::new(quat, pos),
            inertia: SpatialInertia::new(mass, com, inertia),
            geoms: Vec::new(),
        },
        line: head.line,
    });
    Ok(())
}

fn parse_quat(k: &Tok, v: &str) -> Result<UnitQuat, ModelError> {
    let q = parse_floats::<4>(k, v)?;
    let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(syntax(k.line, k.col, "quaternion is not unit length"));
    }
    Ok(UnitQuat::new(q[0], q[1], q[2], q[3]))
}

fn parse_geom(b: &mut Builder, toks: &[Tok]) -> Result<(), ModelError> {
    let head = &toks[0];
    if toks.len() < 2 || toks[1].text.contains('=') {
        return Err(syntax(head.line, head.col, "geom record needs a link name or `world`"));
    }
    let owner = toks[1].text.to_string();
    let kv = split_key_values(&toks[2..]);
    if let Some(f) = kv.flags.first() {
        return Err(syntax(f.line, f.col, format!("unknown geom flag `{}`", f.text)));
    }

    let mut shape_name: Option<(&str, Tok)> = None;
    let mut size_val: Option<(&str, Tok)> = None;
    let mut pos = Vec3::zeros();
    let mut quat = UnitQuat::IDENTITY;
    let mut material: Option<String> = None;
    for (k, v) in kv.pairs {
        match k.text {
            "shape" => shape_name = Some((v, k)),
            "size" => size_val = Some((v, k)),
            "pos" => {
                let p = parse_floats::<3>(&k, v)?;
                pos = Vec3::new(p[0], p[1], p[2]);
            }
            "quat" => quat = parse_quat(&k, v)?,
            "material" => material = Some(v.to_string()),
            other => return Err(syntax(k.line, k.col, format!("unknown geom key `{other}`"))),
        }
    }
    let (shape_name, shape_tok) =
        shape_name.ok_or_else(|| syntax(head.line, head.col, "geom record needs shape=<kind>"))?;
    let (size, size_tok) =
        size_val.ok_or_else(|| syntax(head.line, head.col, "geom record needs size=<...>"))?;
    let shape = match shape_name {
        "sphere" => {
            let s = parse_floats::<1>(&size_tok, size)?;
            Shape::Sphere { r: s[0] }
        }
        "capsule" => {
            let s = parse_floats::<2>(&size_tok, size)?;
            Shape::Capsule { r: s[0], half_len: s[1] }
        }
        "cylinder" => {
            let s = parse_floats::<2>(&size_tok, size)?;
            Shape::Cylinder { r: s[0], half_len: s[1] }
        }
        "box" => {
            let s = parse_floats::<3>(&size_tok, size)?;
            Shape::Box { hx: s[0], hy: s[1], hz: s[2] }
        }
        other => {
            return Err(syntax(shape_tok.line, shape_tok.col, format!("unknown shape `{other}`")))
        }
    };
    let material =
        material.ok_or_else(|| syntax(head.line, head.col, "geom record needs material=<name>"))?;
    b.geoms.push((owner, GeomDef { shape, local_pose: Pose::new(quat, pos), material }, head.line));
    Ok(())
}

fn parse_material(b: &mut Builder, toks: &[Tok]) -> Result<(), ModelError> {
    let head = &toks[0];
    if toks.len() < 2 || toks[1].text.contains('=') {
        return Err(syntax(head.line, head.col, "material record needs a name"));
    }
    let name = toks[1].text.to_string();
    let kv = split_key_values(&toks[2..]);
    if let Some(f) = kv.flags.first() {
        return Err(syntax(f.line, f.col, format!("unknown material flag `{}`", f.text)));
    }
    let mut mat = Material { stiffness: 0.0, damping: 0.0, friction: 0.0 };
    for (k, v) in kv.pairs {
        match k.text {
            "stiffness" => mat.stiffness = parse_f64(&k, v, k.text.len() + 1)?,
            "damping" => mat.damping = parse_f64(&k, v, k.text.len() + 1)?,
            "friction" => mat.friction = parse_f64(&k, v, k.text.len() + 1)?,
            other => return Err(syntax(k.line, k.col, format!("unknown material key `{other}`"))),
        }
    }
    if b.materials.iter().any(|(n, _, _)| *n == name) {
        return Err(syntax(head.line, head.col, format!("duplicate material `{name}`")));
    }
    b.materials.push((name, mat, head.line));
    Ok(())
}

fn assemble(b: Builder) -> Result<ModelDef, ModelError> {
    let mut model = ModelDef::default();
    for (name, mat, _line) in b.materials {
        model.materials.insert(name, mat);
    }
    let mut lines = Vec::new();
    for rec in b.links {
        // Duplicate names caught by validate(), with the line recovered here.
        lines.push(rec.line);
        model.links.push(rec.def);
    }
    for (owner, geom, line) in b.geoms {
        if owner == "world" {
            model.static_geoms.push(geom);
        } else {
            match model.links.iter_mut().find(|l| l.name == owner) {
                Some(link) => link.geoms.push(geom),
                None => {
                    return Err(syntax(line, 6, format!("geom references unknown link `{owner}`")))
                }
            }
        }
    }
    model.validate()?;
    Ok(model)
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_vec3(v: &Vec3) -> String {
    format!("{},{},{}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z))
}

fn fmt_quat(q: &UnitQuat) -> String {
    format!("{},{},{},{}", fmt_f64(q.w), fmt_f64(q.x), fmt_f64(q.y), fmt_f64(q.z))
}

/// Canonical text form; `parse_model(serialize_model(m)) == m` exactly.
pub fn serialize_model(model: &ModelDef) -> String {
    let mut out = String::new();
    for (name, m) in &model.materials {
        let _ = writeln!(
            out,
            "material {name} stiffness={} damping={} friction={}",
            fmt_f64(m.stiffness),
            fmt_f64(m.damping),
            fmt_f64(m.friction)
        );
    }
    for link in &model.links {
        let parent = match link.parent {
            None => "world".to_string(),
            Some(p) => model.links[p].name.clone(),
        };
        let j = &link.joint;
        let mut line = format!(
            "link {} parent={parent} joint={}",
            link.name,
            j.kind.as_str()
        );
        if matches!(j.kind, JointKind::Revolute | JointKind::Prismatic) {
            let _ = write!(line, " axis={}", fmt_vec3(&j.axis));
        }
        let _ = write!(
            line,
            " pos={} quat={} mass={} com={}",
            fmt_vec3(&link.joint_pose.pos),
            fmt_quat(&link.joint_pose.rot),
            fmt_f64(link.inertia.mass),
            fmt_vec3(&link.inertia.com)
        );
        let i = &link.inertia.rot_inertia;
        let _ = write!(
            line,
            " inertia={},{},{},{},{},{}",
            fmt_f64(i[(0, 0)]),
            fmt_f64(i[(1, 1)]),
            fmt_f64(i[(2, 2)]),
            fmt_f64(i[(0, 1)]),
            fmt_f64(i[(0, 2)]),
            fmt_f64(i[(1, 2)])
        );
        if let Some((lo, hi)) = j.limits {
            let _ = write!(line, " limits={},{}", fmt_f64(lo), fmt_f64(hi));
        }
        if j.damping != 0.0 {
            let _ = write!(line, " damping={}", fmt_f64(j.damping));
        }
        if j.actuated {
            let _ = write!(line, " actuated");
        }
        if j.stiffness != 0.0 {
            let _ = write!(line, " stiffness={}", fmt_f64(j.stiffness));
        }
        if j.servo_damping != 0.0 {
            let _ = write!(line, " adamping={}", fmt_f64(j.servo_damping));
        }
        if j.tau_max != DEFAULT_TAU_MAX {
            let _ = write!(line, " taumax={}", fmt_f64(j.tau_max));
        }
        if let Some(c) = &j.coupling {
            let _ = write!(line, " couple={}:{}", c.group, fmt_f64(c.ratio));
        }
        if let Some((open, closed)) = j.grip {
            let _ = write!(line, " grip={}:{}", fmt_f64(open), fmt_f64(closed));
        }
        out.push_str(&line);
        out.push('\n');
        for g in &link.geoms {
            write_geom(&mut out, &link.name, g);
        }
    }
    for g in &model.static_geoms {
        write_geom(&mut out, "world", g);
    }
    out
}

fn write_geom(out: &mut String, owner: &str, g: &GeomDef) {
    let (shape, size) = match g.shape {
        Shape::Sphere { r } => ("sphere", fmt_f64(r)),
        Shape::Capsule { r, half_len } => ("capsule", format!("{},{}", fmt_f64(r), fmt_f64(half_len))),
        Shape::Cylinder { r, half_len } => {
            ("cylinder", format!("{},{}", fmt_f64(r), fmt_f64(half_len)))
        }
        Shape::Box { hx, hy, hz } => {
            ("box", format!("{},{},{}", fmt_f64(hx), fmt_f64(hy), fmt_f64(hz)))
        }
    };
    let _ = writeln!(
        out,
        "geom {owner} shape={shape} size={size} pos={} quat={} material={}",
        fmt_vec3(&g.local_pose.pos),
        fmt_quat(&g.local_pose.rot),
        g.material
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const MINIMAL: &str = "link base parent=world joint=free mass=9.58 com=0,0,0 inertia=0.16,0.16,0.16,0,0,0\n";

    #[test]
    fn minimal_model_parses() {
        let m = parse_model(MINIMAL).unwrap();
        assert_eq!(m.links.len(), 1);
        let layout = m.layout();
        assert_eq!((layout.q_dim, layout.v_dim), (7, 6));
    }

    #[test]
    fn duplicate_link_name_is_error() {
        let text = format!(
            "{MINIMAL}link base parent=base joint=revolute axis=0,0,1 mass=1 com=0,0,0 inertia=1e-3,1e-3,1e-3,0,0,0\n"
        );
        let err = parse_model(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate link name"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("link base parent=world joint=free mass=oops com=0,0,0 inertia=1,1,1,0,0,0\n")
            .unwrap_err();
        match err {
            ModelError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 30);
            }
            other => panic!("expected syntax error, got {other}"),
        }
        let err = parse_model("lonk base\n").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 1, col: 1, .. }));
    }

    #[test]
    fn unknown_parent_is_error() {
        let err = parse_model(
            "link base parent=nowhere joint=free mass=1 com=0,0,0 inertia=1,1,1,0,0,0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("not declared"));
    }

    #[test]
    fn nonpositive_mass_is_error() {
        let err =
            parse_model("link base parent=world joint=free mass=0 com=0,0,0 inertia=1,1,1,0,0,0\n")
                .unwrap_err();
        assert!(err.to_string().contains("mass must be positive"));
    }

    pub(crate) fn random_model(rng: &mut ChaCha8Rng) -> ModelDef {
        let n_mats = rng.gen_range(1..3);
        let mut text = String::new();
        for i in 0..n_mats {
            text.push_str(&format!(
                "material m{i} stiffness={} damping={} friction={}\n",
                rng.gen_range(1.0..1e5),
                rng.gen_range(0.0..100.0),
                rng.gen_range(0.0..2.0)
            ));
        }
        text.push_str(MINIMAL);
        let n_links = rng.gen_range(0..5);
        for i in 0..n_links {
            let parent = if i == 0 || rng.gen_bool(0.5) {
                "base".to_string()
            } else {
                format!("l{}", rng.gen_range(0..i))
            };
            let kinds = ["revolute", "prismatic", "fixed"];
            let kind = kinds[rng.gen_range(0..kinds.len())];
            let axis = {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0f64),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if v.norm() < 1e-2 {
                    Vec3::z()
                } else {
                    v / v.norm()
                }
            };
            let mut line = format!("link l{i} parent={parent} joint={kind}");
            if kind != "fixed" {
                line.push_str(&format!(" axis={}", fmt_vec3(&axis)));
                if rng.gen_bool(0.7) {
                    let lo = rng.gen_range(-2.0..0.0);
                    let hi = rng.gen_range(0.0..2.0);
                    line.push_str(&format!(" limits={},{}", fmt_f64(lo), fmt_f64(hi)));
                }
                if rng.gen_bool(0.5) {
                    line.push_str(" actuated");
                    line.push_str(&format!(" stiffness={}", fmt_f64(rng.gen_range(0.5..50.0))));
                    if rng.gen_bool(0.5) {
                        line.push_str(&format!(" taumax={}", fmt_f64(rng.gen_range(0.1..10.0))));
                    }
                }
                if rng.gen_bool(0.3) {
                    line.push_str(&format!(" damping={}", fmt_f64(rng.gen_range(0.0..1.0))));
                }
            }
            let q = UnitQuat::from_axis_angle(&Vec3::y(), rng.gen_range(-1.5..1.5));
            line.push_str(&format!(
                " pos={} quat={} mass={} com={} inertia={},{},{},0,0,0",
                fmt_vec3(&Vec3::new(
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.3..0.3)
                )),
                fmt_quat(&q),
                fmt_f64(rng.gen_range(0.01..5.0)),
                fmt_vec3(&Vec3::new(rng.gen_range(-0.1..0.1), 0.0, 0.0)),
                fmt_f64(rng.gen_range(1e-5..1e-2)),
                fmt_f64(rng.gen_range(1e-5..1e-2)),
                fmt_f64(rng.gen_range(1e-5..1e-2)),
            ));
            text.push('\n');
            text.push_str(&line);
            text.push('\n');
            if rng.gen_bool(0.6) {
                let shapes = ["sphere", "capsule", "cylinder", "box"];
                let shape = shapes[rng.gen_range(0..shapes.len())];
                let size = match shape {
                    "sphere" => fmt_f64(rng.gen_range(0.001..0.1)),
                    "box" => format!(
                        "{},{},{}",
                        fmt_f64(rng.gen_range(0.001..0.2)),
                        fmt_f64(rng.gen_range(0.001..0.2)),
                        fmt_f64(rng.gen_range(0.001..0.2))
                    ),
                    _ => format!(
                        "{},{}",
                        fmt_f64(rng.gen_range(0.001..0.1)),
                        fmt_f64(rng.gen_range(0.01..0.3))
                    ),
                };
                text.push_str(&format!(
                    "geom l{i} shape={shape} size={size} pos=0,0,0 quat=1,0,0,0 material=m{}\n",
                    rng.gen_range(0..n_mats)
                ));
            }
        }
        if rng.gen_bool(0.5) {
            text.push_str(&format!(
                "geom world shape=cylinder size={},{} pos=0.4,0,0 quat=1,0,0,0 material=m0\n",
                fmt_f64(rng.gen_range(0.005..0.05)),
                fmt_f64(rng.gen_range(0.1..0.5))
            ));
        }
        match parse_model(&text) {
            Ok(m) => m,
            Err(e) => panic!("generated model failed to parse: {e}\n{text}"),
        }
    }

    #[test]
    fn round_trip_50_generated_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let m = random_model(&mut rng);
            let text = serialize_model(&m);
            let reparsed = parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert_eq!(m, reparsed);
            // Canonical form is a fixed point.
            assert_eq!(text, serialize_model(&reparsed));
        }
    }

    #[test]
    fn fuzz_never_panics() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let alphabet: Vec<char> =
            "link geom material parent= joint=free axis,0.5 -1e3 # \n\t=:\u{fe0f}abcxyz".chars().collect();
        for _ in 0..20_000 {
            let len = rng.gen_range(0..160);
            let s: String =
                (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
            let _ = parse_model(&s);
        }
        for _ in 0..5_000 {
            let len = rng.gen_range(0..80);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let s = String::from_utf8_lossy(&bytes);
            let _ = parse_model(&s);
        }
    }
}
