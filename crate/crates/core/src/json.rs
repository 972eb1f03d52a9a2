//! JSON encodings of the public types: Levis and parabolics as arrays of
//! 1-based index arrays, vectors as arrays of "p/q" strings, families as
//! {"group": {"n": ..}, "levi": [[..]], "points": {"<order-key>": [".."]}}.

use crate::polytope::PositiveOrthogonalFamily;
use crate::ratmat::{parse_rat, Rat};
use crate::rootdata::{GroupData, Levi, Parabolic};
use crate::{Error, Result};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub fn rat_to_json(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn vec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

pub fn vec_from_json(v: &Value) -> Result<Vec<Rat>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema("vector must be an array".into()))?;
    arr.iter()
        .map(|x| {
            x.as_str()
                .ok_or_else(|| Error::Schema("vector entries must be \"p/q\" strings".into()))
                .and_then(parse_rat)
        })
        .collect()
}

pub fn levi_to_json(m: &Levi) -> Value {
    Value::Array(
        m.blocks()
            .iter()
            .map(|b| Value::Array(b.iter().map(|i| json!(i + 1)).collect()))
            .collect(),
    )
}

pub fn levi_from_json(g: &GroupData, v: &Value) -> Result<Levi> {
    let blocks = index_blocks_from_json(v)?;
    Levi::new(g, blocks)
}

pub fn parabolic_to_json(p: &Parabolic) -> Value {
    Value::Array(
        p.order()
            .iter()
            .map(|b| Value::Array(b.iter().map(|i| json!(i + 1)).collect()))
            .collect(),
    )
}

pub fn parabolic_from_json(g: &GroupData, v: &Value) -> Result<Parabolic> {
    let blocks = index_blocks_from_json(v)?;
    Parabolic::new(g, blocks)
}

fn index_blocks_from_json(v: &Value) -> Result<Vec<Vec<usize>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema("expected an array of index arrays".into()))?;
    arr.iter()
        .map(|b| {
            let block = b
                .as_array()
                .ok_or_else(|| Error::Schema("block must be an array".into()))?;
            block
                .iter()
                .map(|i| {
                    let k = i
                        .as_u64()
                        .ok_or_else(|| Error::Schema("index must be a positive integer".into()))?;
                    if k == 0 {
                        return Err(Error::Schema("indices are 1-based".into()));
                    }
                    Ok((k - 1) as usize)
                })
                .collect()
        })
        .collect()
}

pub fn family_to_json(f: &PositiveOrthogonalFamily) -> Value {
    let mut points = Map::new();
    for (p, y) in f.points() {
        points.insert(p.key(), vec_to_json(y));
    }
    json!({
        "group": {"n": f.group().n()},
        "levi": levi_to_json(f.levi()),
        "points": Value::Object(points),
    })
}

pub fn family_from_json(v: &Value) -> Result<PositiveOrthogonalFamily> {
    let n = v
        .pointer("/group/n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Schema("missing group.n".into()))? as usize;
    let g = GroupData::new(n)?;
    let levi = levi_from_json(
        &g,
        v.get("levi")
            .ok_or_else(|| Error::Schema("missing levi".into()))?,
    )?;
    let pts_obj = v
        .get("points")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Schema("missing points object".into()))?;
    let mut points = BTreeMap::new();
    for (key, val) in pts_obj {
        let p = Parabolic::from_key(&g, key)?;
        points.insert(p, vec_from_json(val)?);
    }
    PositiveOrthogonalFamily::new(g, levi, points)
}
