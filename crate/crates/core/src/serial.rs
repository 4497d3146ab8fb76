//! JSON wire formats: scalars as strings, matrices and vectors as string
//! arrays, cross products with tensor or star payloads, group presentations
//! with signed-multiset relations, and gradings.

use std::fmt;

use serde_json::{json, Map, Value};

use crate::abgroup::AbGroup;
use crate::cayley::Basis;
use crate::crossprod::{build_star, multi_indices, CrossProduct, Payload};
use crate::gradings::{Grading, StructureTag};
use crate::linalg::{Matrix, QuadSpace, Vector};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerialError(pub String);

impl fmt::Display for SerialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for SerialError {}

fn err(msg: impl Into<String>) -> SerialError {
    SerialError(msg.into())
}

pub fn vector_to_json(v: &[crate::scalar::Scalar]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(s.literal())).collect())
}

pub fn vector_from_json(field: &Field, v: &Value) -> Result<Vector, SerialError> {
    let arr = v.as_array().ok_or_else(|| err("expected an array"))?;
    arr.iter()
        .map(|s| {
            let text = s.as_str().ok_or_else(|| err("expected a scalar string"))?;
            field
                .parse_scalar(text)
                .map_err(|e| err(format!("bad scalar {text:?}: {e}")))
        })
        .collect()
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.row(i))).collect())
}

pub fn matrix_from_json(field: &Field, v: &Value) -> Result<Matrix, SerialError> {
    let arr = v.as_array().ok_or_else(|| err("expected an array of rows"))?;
    let rows: Result<Vec<Vector>, SerialError> =
        arr.iter().map(|r| vector_from_json(field, r)).collect();
    Ok(Matrix::from_rows(field, rows?))
}

/// { "arity", "dim", "kind": "tensor" | "star", "tensor": nested arrays,
///   "gram": matrix } — the tensor is indexed by basis tuples, innermost
/// arrays are output coordinates.
pub fn cross_to_json(x: &CrossProduct) -> Value {
    let mut obj = Map::new();
    obj.insert("arity".into(), json!(x.arity));
    obj.insert("dim".into(), json!(x.dim));
    obj.insert("field".into(), json!(x.field.descriptor()));
    match &x.payload {
        Payload::Star(_) => {
            obj.insert("kind".into(), json!("star"));
        }
        Payload::Tensor(_) => {
            obj.insert("kind".into(), json!("tensor"));
            fn nest(x: &CrossProduct, prefix: &mut Vec<usize>, depth: usize) -> Value {
                if depth == 0 {
                    return vector_to_json(&x.eval_basis(prefix));
                }
                Value::Array(
                    (0..x.dim)
                        .map(|i| {
                            prefix.push(i);
                            let v = nest(x, prefix, depth - 1);
                            prefix.pop();
                            v
                        })
                        .collect(),
                )
            }
            obj.insert("tensor".into(), nest(x, &mut Vec::new(), x.arity));
        }
    }
    if let Some(g) = &x.gram {
        obj.insert("gram".into(), matrix_to_json(g.gram()));
    }
    Value::Object(obj)
}

pub fn cross_from_json(field: &Field, v: &Value) -> Result<CrossProduct, SerialError> {
    let obj = v.as_object().ok_or_else(|| err("expected an object"))?;
    let arity = obj
        .get("arity")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing arity"))? as usize;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing dim"))? as usize;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing kind"))?;
    let gram = match obj.get("gram") {
        Some(g) => Some(
            QuadSpace::new(matrix_from_json(field, g)?)
                .map_err(|e| err(format!("bad gram: {e}")))?,
        ),
        None => None,
    };
    match kind {
        "star" => {
            let space = gram.ok_or_else(|| err("star kind requires a gram"))?;
            if space.dim() != dim || arity + 1 != dim {
                return Err(err("star kind requires arity = dim - 1"));
            }
            build_star(space).map_err(|e| err(format!("cannot build star product: {e}")))
        }
        "tensor" => {
            let tensor = obj.get("tensor").ok_or_else(|| err("missing tensor"))?;
            let mut values: Vec<Vector> = Vec::with_capacity(dim.pow(arity as u32));
            for idx in multi_indices(dim, arity) {
                let mut cur = tensor;
                for &i in &idx {
                    cur = cur
                        .as_array()
                        .and_then(|a| a.get(i))
                        .ok_or_else(|| err("tensor nesting does not match arity and dim"))?;
                }
                let v = vector_from_json(field, cur)?;
                if v.len() != dim {
                    return Err(err("tensor output length does not match dim"));
                }
                values.push(v);
            }
            let ranks = |idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * dim + i);
            Ok(CrossProduct::from_tensor_fn(field, arity, dim, gram, |idx| {
                values[ranks(idx)].clone()
            }))
        }
        other => Err(err(format!("unknown kind {other:?}"))),
    }
}

/// { "generators": ["x1", ...], "relations": [["x1","x1","-y1"], ...] } with
/// signed-multiset relations: each listed name contributes +-1 to the
/// exponent vector, and the relation asserts the product is the identity.
pub fn group_to_json(names: &[String], relations: &[Vec<i64>]) -> Value {
    let rels: Vec<Value> = relations
        .iter()
        .map(|row| {
            let mut items: Vec<Value> = Vec::new();
            for (j, &e) in row.iter().enumerate() {
                let (count, sign) = (e.unsigned_abs(), e < 0);
                for _ in 0..count {
                    let name = if sign {
                        format!("-{}", names[j])
                    } else {
                        names[j].clone()
                    };
                    items.push(Value::String(name));
                }
            }
            Value::Array(items)
        })
        .collect();
    json!({ "generators": names, "relations": rels })
}

pub struct GroupSpec {
    pub names: Vec<String>,
    pub relations: Vec<Vec<i64>>,
    pub group: AbGroup,
}

pub fn group_from_json(v: &Value) -> Result<GroupSpec, SerialError> {
    let obj = v.as_object().ok_or_else(|| err("expected a group object"))?;
    let names: Vec<String> = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing generators"))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| err("generator names must be strings"))
        })
        .collect::<Result<_, _>>()?;
    let mut relations = Vec::new();
    if let Some(rels) = obj.get("relations") {
        for rel in rels.as_array().ok_or_else(|| err("relations must be an array"))? {
            let mut row = vec![0i64; names.len()];
            for item in rel.as_array().ok_or_else(|| err("each relation is an array"))? {
                let s = item.as_str().ok_or_else(|| err("relation items are strings"))?;
                let (name, sign) = match s.strip_prefix('-') {
                    Some(rest) => (rest, -1i64),
                    None => (s, 1),
                };
                let j = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| err(format!("unknown generator {name:?}")))?;
                row[j] += sign;
            }
            relations.push(row);
        }
    }
    let group = AbGroup::from_presentation(names.len(), &relations);
    Ok(GroupSpec {
        names,
        relations,
        group,
    })
}

fn tag_to_str(tag: StructureTag) -> &'static str {
    match tag {
        StructureTag::C0Cross => "c0x",
        StructureTag::ThreeFold => "x1",
        StructureTag::Triple3C => "3c",
        StructureTag::Star => "star",
        StructureTag::OneFold => "onefold",
    }
}

/// { "structure", "basis", "field", "group", "assignments":
///   [{ "vector": [...], "degree": [...] }], "gram": ... } — degrees are
/// exponent vectors over the group generators.
pub fn grading_to_json(g: &Grading, names: &[String], relations: &[Vec<i64>]) -> Value {
    let assignments: Vec<Value> = g
        .basis
        .iter()
        .map(|(v, d)| {
            let exps: Vec<i64> = g
                .group
                .representative_exponents(d)
                .iter()
                .map(|b| b.to_string().parse().unwrap())
                .collect();
            json!({ "vector": vector_to_json(v), "degree": exps })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("structure".into(), json!(tag_to_str(g.tag)));
    obj.insert("field".into(), json!(g.field().descriptor()));
    obj.insert("group".into(), group_to_json(names, relations));
    obj.insert("assignments".into(), Value::Array(assignments));
    if let Some(space) = &g.map.gram {
        obj.insert("gram".into(), matrix_to_json(space.gram()));
    }
    Value::Object(obj)
}

pub fn grading_from_json(v: &Value) -> Result<Grading, SerialError> {
    let obj = v.as_object().ok_or_else(|| err("expected a grading object"))?;
    let field = Field::parse(
        obj.get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| err("missing field"))?,
    )
    .map_err(|e| err(format!("bad field: {e}")))?;
    let structure = obj
        .get("structure")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing structure"))?;
    let basis_tag = match obj.get("basis").and_then(Value::as_str) {
        Some("cd") => Basis::Cd,
        _ => Basis::Std,
    };
    let (tag, map) = match structure {
        "3c" => (
            StructureTag::Triple3C,
            crate::crossprod::build_triple_3c(&field, basis_tag),
        ),
        "x1" => (
            StructureTag::ThreeFold,
            crate::crossprod::build_three_fold(1, &field.one(), &field, basis_tag)
                .map_err(|e| err(e.to_string()))?,
        ),
        "c0x" => (StructureTag::C0Cross, crate::crossprod::build_c0(&field)),
        "star" => {
            let gram = matrix_from_json(
                &field,
                obj.get("gram").ok_or_else(|| err("star structure requires a gram"))?,
            )?;
            let space = QuadSpace::new(gram).map_err(|e| err(format!("bad gram: {e}")))?;
            (
                StructureTag::Star,
                build_star(space).map_err(|e| err(e.to_string()))?,
            )
        }
        other => return Err(err(format!("unknown structure {other:?}"))),
    };
    let spec = group_from_json(obj.get("group").ok_or_else(|| err("missing group"))?)?;
    let mut basis = Vec::new();
    for a in obj
        .get("assignments")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing assignments"))?
    {
        let ao = a.as_object().ok_or_else(|| err("assignment must be an object"))?;
        let vector = vector_from_json(
            &field,
            ao.get("vector").ok_or_else(|| err("assignment missing vector"))?,
        )?;
        let exps: Vec<i64> = ao
            .get("degree")
            .and_then(Value::as_array)
            .ok_or_else(|| err("assignment missing degree"))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| err("degree entries are integers")))
            .collect::<Result<_, _>>()?;
        if exps.len() != spec.group.generators() {
            return Err(err("degree exponent length does not match generators"));
        }
        basis.push((vector, spec.group.element_from_exponents(&exps)));
    }
    if basis.len() != map.dim {
        return Err(err("assignment count does not match the structure dimension"));
    }
    Ok(Grading {
        tag,
        map,
        group: spec.group,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossprod::{build_c0, verify_axioms, VerifyOptions};

    #[test]
    fn cross_round_trip_tensor() {
        let f = Field::rationals();
        let x = build_c0(&f);
        let v = cross_to_json(&x);
        let back = cross_from_json(&f, &v).unwrap();
        assert_eq!(back.arity, 2);
        assert_eq!(back.dim, 7);
        for idx in multi_indices(7, 2) {
            assert_eq!(x.eval_basis(&idx), back.eval_basis(&idx));
        }
        let g = back.gram.clone().unwrap();
        assert!(verify_axioms(&back, &g, &VerifyOptions::default()).pass);
    }

    #[test]
    fn cross_round_trip_star() {
        let f = Field::prime(5).unwrap();
        let x = build_star(QuadSpace::standard(&f, 4)).unwrap();
        let v = cross_to_json(&x);
        assert_eq!(v["kind"], "star");
        let back = cross_from_json(&f, &v).unwrap();
        for idx in multi_indices(4, 3) {
            assert_eq!(x.eval_basis(&idx), back.eval_basis(&idx));
        }
    }

    #[test]
    fn grading_round_trip() {
        let f = Field::rationals();
        let g = crate::gradings::cartan_grading(&f);
        let names = vec!["a".into(), "b".into(), "c".into()];
        let v = grading_to_json(&g, &names, &[]);
        let back = grading_from_json(&v).unwrap();
        assert!(crate::gradings::verify_grading(&back).unwrap().ok);
        for (x, y) in g.basis.iter().zip(&back.basis) {
            assert_eq!(x.0, y.0);
            assert_eq!(x.1, y.1);
        }
    }

    #[test]
    fn malformed_inputs_error() {
        let f = Field::rationals();
        assert!(cross_from_json(&f, &json!({ "arity": 2 })).is_err());
        assert!(vector_from_json(&f, &json!(["1", "nope"])).is_err());
        assert!(group_from_json(&json!({ "generators": ["x"], "relations": [["y"]] })).is_err());
    }
}
