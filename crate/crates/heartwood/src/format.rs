//! JSON and DOT encodings of trees, systems and balls.
//!
//! Scalars are written exactly: a rational as `"p/q"`, and an element of
//! `Q(√d)` as `{"a": "p/q", "b": "r/s"}` meaning `a + b√d`. Decimal numbers
//! are rejected so nothing is ever rounded.

use std::fmt::Write as _;

use heartwood_core::suspension::BallTree;
use heartwood_core::{Alphabet, Edge, Field, GeneratorSpec, IsometrySystem, MetricTree, Scalar, Subtree, TreePoint};
use serde_json::{json, Map, Value};

/// A file could not be read as a tree or system.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    /// The data parsed but the model rejected it.
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: heartwood_core::Error,
    },
}

impl FormatError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        FormatError::Schema {
            path: path.to_string(),
            message: message.into(),
        }
    }

    fn model(path: &str, source: heartwood_core::Error) -> Self {
        FormatError::Model {
            path: path.to_string(),
            source,
        }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field_at<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| FormatError::schema(path, format!("missing field '{key}'")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| FormatError::schema(path, "expected an array"))
}

fn as_index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| FormatError::schema(path, "expected a non-negative integer"))
}

fn ratio_text(v: &Value, path: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        Value::Number(_) => Err(FormatError::schema(path, "decimal numbers are not exact; write \"p/q\"")),
        _ => Err(FormatError::schema(path, "expected a \"p/q\" string")),
    }
}

pub fn parse_field(v: &Value, path: &str) -> Result<Field> {
    let kind = field_at(v, path, "kind")?
        .as_str()
        .ok_or_else(|| FormatError::schema(&format!("{path}.kind"), "expected a string"))?;
    match kind {
        "rational" => Ok(Field::Rational),
        "quadratic" => {
            let d = field_at(v, path, "d")?
                .as_u64()
                .ok_or_else(|| FormatError::schema(&format!("{path}.d"), "expected a positive integer"))?;
            let d = u32::try_from(d).map_err(|_| FormatError::schema(&format!("{path}.d"), "radicand too large"))?;
            Field::quadratic(d).map_err(|e| FormatError::model(&format!("{path}.d"), e))
        }
        other => Err(FormatError::schema(&format!("{path}.kind"), format!("unknown scalar kind '{other}'"))),
    }
}

pub fn field_json(f: Field) -> Value {
    match f {
        Field::Rational => json!({"kind": "rational"}),
        Field::Quadratic(d) => json!({"kind": "quadratic", "d": d}),
    }
}

pub fn parse_scalar(v: &Value, field: Field, path: &str) -> Result<Scalar> {
    let text = match v {
        Value::Object(m) => {
            let a = ratio_text(m.get("a").unwrap_or(&json!("0")), &format!("{path}.a"))?;
            let b = ratio_text(m.get("b").unwrap_or(&json!("0")), &format!("{path}.b"))?;
            if let Some(k) = m.keys().find(|k| *k != "a" && *k != "b") {
                return Err(FormatError::schema(path, format!("unexpected key '{k}' in a scalar")));
            }
            format!("{a}:{b}")
        }
        other => ratio_text(other, path)?,
    };
    Scalar::parse_in(&text, field).map_err(|e| FormatError::model(path, e))
}

pub fn scalar_json(x: &Scalar) -> Value {
    if x.is_rational() {
        Value::String(Scalar::ratio_string(x.rational_part()))
    } else {
        json!({
            "a": Scalar::ratio_string(x.rational_part()),
            "b": Scalar::ratio_string(x.irrational_part()),
        })
    }
}

pub fn parse_point(v: &Value, tree: &MetricTree, path: &str) -> Result<TreePoint> {
    let p = if let Some(id) = v.get("v") {
        let id = as_index(id, &format!("{path}.v"))?;
        TreePoint::Vertex(id)
    } else if let Some(e) = v.get("e") {
        let e = as_index(e, &format!("{path}.e"))?;
        let off = parse_scalar(field_at(v, path, "off")?, tree.field(), &format!("{path}.off"))?;
        tree.edge_point(e, off).map_err(|err| FormatError::model(path, err))?
    } else {
        return Err(FormatError::schema(path, "a point is {\"v\": id} or {\"e\": id, \"off\": SCALAR}"));
    };
    tree.check_point(&p).map_err(|e| FormatError::model(path, e))?;
    Ok(p)
}

pub fn point_json(p: &TreePoint) -> Value {
    match p {
        TreePoint::Vertex(v) => json!({"v": v}),
        TreePoint::Edge { edge, offset } => json!({"e": edge, "off": scalar_json(offset)}),
    }
}

pub fn subtree_json(s: &Subtree) -> Value {
    Value::Array(s.extremals().iter().map(point_json).collect())
}

pub fn parse_tree(v: &Value, path: &str) -> Result<MetricTree> {
    let field = parse_field(field_at(v, path, "scalar")?, &format!("{path}.scalar"))?;
    let verts = as_array(field_at(v, path, "vertices")?, &format!("{path}.vertices"))?;
    let n = verts.len();
    let mut seen = vec![false; n];
    for (i, x) in verts.iter().enumerate() {
        let p = format!("{path}.vertices[{i}]");
        let id = as_index(x, &p)?;
        if id >= n || seen[id] {
            return Err(FormatError::schema(&p, format!("vertex ids must be 0..{n} without repeats")));
        }
        seen[id] = true;
    }
    let edges_v = as_array(field_at(v, path, "edges")?, &format!("{path}.edges"))?;
    let mut edges = Vec::with_capacity(edges_v.len());
    for (i, e) in edges_v.iter().enumerate() {
        let p = format!("{path}.edges[{i}]");
        edges.push(Edge {
            u: as_index(field_at(e, &p, "u")?, &format!("{p}.u"))?,
            v: as_index(field_at(e, &p, "v")?, &format!("{p}.v"))?,
            len: parse_scalar(field_at(e, &p, "len")?, field, &format!("{p}.len"))?,
        });
    }
    MetricTree::new(n, field, edges).map_err(|e| FormatError::model(path, e))
}

pub fn tree_json(t: &MetricTree) -> Value {
    json!({
        "scalar": field_json(t.field()),
        "vertices": (0..t.vertex_count()).collect::<Vec<_>>(),
        "edges": t.edges().iter().map(|e| json!({"u": e.u, "v": e.v, "len": scalar_json(&e.len)})).collect::<Vec<_>>(),
    })
}

pub fn parse_system_value(v: &Value) -> Result<IsometrySystem> {
    let tree = parse_tree(field_at(v, "$", "tree")?, "$.tree")?;
    let isos = as_array(field_at(v, "$", "isometries")?, "$.isometries")?;
    if isos.is_empty() {
        return Err(FormatError::schema("$.isometries", "a system needs at least one isometry"));
    }
    let mut names = Vec::new();
    let mut specs = Vec::new();
    for (i, g) in isos.iter().enumerate() {
        let p = format!("$.isometries[{i}]");
        let name = field_at(g, &p, "name")?
            .as_str()
            .ok_or_else(|| FormatError::schema(&format!("{p}.name"), "expected a string"))?
            .to_string();
        let pts = |key: &str| -> Result<Vec<TreePoint>> {
            let kp = format!("{p}.{key}");
            as_array(field_at(g, &p, key)?, &kp)?
                .iter()
                .enumerate()
                .map(|(j, x)| parse_point(x, &tree, &format!("{kp}[{j}]")))
                .collect()
        };
        let domain = pts("domain")?;
        let images = pts("images")?;
        names.push(name.clone());
        specs.push(GeneratorSpec { name, domain, images });
    }
    let alphabet = Alphabet::new(names).map_err(|e| FormatError::model("$.isometries", e))?;
    IsometrySystem::new(tree, alphabet, specs).map_err(|e| {
        let at = match &e {
            heartwood_core::Error::IsometryViolation { generator, .. } => isos
                .iter()
                .position(|g| g.get("name").and_then(Value::as_str) == Some(generator))
                .map_or("$.isometries".to_string(), |i| format!("$.isometries[{i}]")),
            _ => "$.isometries".to_string(),
        };
        FormatError::model(&at, e)
    })
}

pub fn parse_system(text: &str) -> Result<IsometrySystem> {
    parse_system_value(&parse_json(text)?)
}

pub fn system_json(sys: &IsometrySystem) -> Value {
    let isos: Vec<Value> = sys
        .specs()
        .iter()
        .map(|g| {
            json!({
                "name": g.name,
                "domain": g.domain.iter().map(point_json).collect::<Vec<_>>(),
                "images": g.images.iter().map(point_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"tree": tree_json(sys.tree()), "isometries": isos})
}

pub fn serialize_system(sys: &IsometrySystem) -> String {
    serde_json::to_string_pretty(&system_json(sys)).expect("values serialize")
}

/// The host tree of a ball, plus each copy's images of the vertices of `K`.
pub fn ball_json(ball: &BallTree) -> Value {
    let mut v = tree_json(ball.host());
    let names = ball.system().alphabet();
    let mut copies = Map::new();
    for w in ball.words() {
        let pts = ball.embedding(w).expect("listed copy");
        copies.insert(names.format(w), Value::Array(pts.iter().map(point_json).collect()));
    }
    v["copies"] = Value::Object(copies);
    v
}

/// Graphviz rendering of a ball; each node's tooltip lists the copies through it.
pub fn ball_dot(ball: &BallTree) -> String {
    let host = ball.host();
    let names = ball.system().alphabet();
    let mut out = String::from("graph ball {\n  node [shape=point];\n");
    for v in 0..host.vertex_count() {
        let copies: Vec<String> = ball
            .copies_containing(&TreePoint::Vertex(v))
            .iter()
            .map(|(w, x)| format!("{}:{}", names.format(w), x))
            .collect();
        writeln!(out, "  {v} [tooltip=\"{}\"];", copies.join(" ")).unwrap();
    }
    for e in host.edges() {
        writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.len).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Graphviz rendering of a system's tree with generator domains as clusters of labels.
pub fn system_dot(sys: &IsometrySystem) -> String {
    let t = sys.tree();
    let mut out = String::from("graph system {\n");
    for v in 0..t.vertex_count() {
        writeln!(out, "  {v};").unwrap();
    }
    for e in t.edges() {
        writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.len).unwrap();
    }
    for g in sys.generators() {
        let dom: Vec<String> = g.domain().extremals().iter().map(|p| p.to_string()).collect();
        let img: Vec<String> = g.image().extremals().iter().map(|p| p.to_string()).collect();
        writeln!(out, "  // {}: [{}] -> [{}]", g.name, dom.join(", "), img.join(", ")).unwrap();
    }
    out.push_str("}\n");
    out
}
