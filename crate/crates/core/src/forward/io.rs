//! JSON form of a measurement set.
//!
//! ```json
//! {"kind": "pointwise_unipolar", "N": 1, "half_width": 0.225, "outputs": [[...]]}
//! ```
//!
//! Pointwise outputs are arrays of Γ₁ trace values, averaged outputs are
//! plain numbers. Floats are written with 17 significant digits.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::model::{MeasurementKind, Outputs};
use super::profiles::{make_voltage_profiles, VoltageProfile};
use crate::error::{Error, Result};
use crate::grid::{fmt17, Grid};

/// Voltage profiles together with their measured outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub half_width: f64,
    pub profiles: Vec<VoltageProfile>,
    pub outputs: Outputs,
}

impl MeasurementSet {
    pub fn new(half_width: f64, profiles: Vec<VoltageProfile>, outputs: Outputs) -> Result<Self> {
        if profiles.len() != outputs.len() || profiles.is_empty() {
            return Err(Error::Dimension(format!(
                "{} profiles but {} outputs",
                profiles.len(),
                outputs.len()
            )));
        }
        Ok(MeasurementSet {
            half_width,
            profiles,
            outputs,
        })
    }

    pub fn kind(&self) -> MeasurementKind {
        self.outputs.kind()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn to_json(&self) -> String {
        let num = |v: f64| Value::Number(Number::from_str(&fmt17(v)).expect("finite float"));
        let outputs = self
            .outputs
            .components()
            .iter()
            .map(|c| {
                if self.kind().is_pointwise() {
                    Value::Array(c.iter().map(|&v| num(v)).collect())
                } else {
                    num(c[0])
                }
            })
            .collect();
        let mut m = Map::new();
        m.insert("kind".into(), Value::String(self.kind().name().into()));
        m.insert("N".into(), Value::from(self.len()));
        m.insert("half_width".into(), num(self.half_width));
        m.insert("outputs".into(), Value::Array(outputs));
        let mut s = serde_json::to_string(&Value::Object(m)).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses the JSON form; profiles are regenerated on `grid`.
    pub fn from_json(text: &str, grid: &Grid) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("measurement set: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("measurement set must be a JSON object".into()))?;
        let field = |k: &str| {
            obj.get(k)
                .ok_or_else(|| Error::Parse(format!("measurement set lacks `{k}`")))
        };
        let kind_name = field("kind")?
            .as_str()
            .ok_or_else(|| Error::Parse("`kind` must be a string".into()))?;
        let kind = MeasurementKind::parse(kind_name)
            .ok_or_else(|| Error::Parse(format!("unknown measurement kind {kind_name:?}")))?;
        let count = field("N")?
            .as_u64()
            .ok_or_else(|| Error::Parse("`N` must be a nonnegative integer".into()))?
            as usize;
        let half_width = field("half_width")?
            .as_f64()
            .ok_or_else(|| Error::Parse("`half_width` must be a number".into()))?;
        let raw = field("outputs")?
            .as_array()
            .ok_or_else(|| Error::Parse("`outputs` must be an array".into()))?;
        if raw.len() != count {
            return Err(Error::Parse(format!(
                "`N` is {count} but {} outputs are listed",
                raw.len()
            )));
        }
        let as_f64 = |x: &Value| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("expected a number, found {x}")))
        };
        let components = raw
            .iter()
            .map(|c| {
                if kind.is_pointwise() {
                    c.as_array()
                        .ok_or_else(|| Error::Parse("pointwise outputs must be arrays".into()))?
                        .iter()
                        .map(as_f64)
                        .collect::<Result<Vec<_>>>()
                } else {
                    Ok(vec![as_f64(c)?])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let outputs = Outputs::new(grid, kind, components)?;
        let profiles = make_voltage_profiles(count, half_width, grid)?;
        MeasurementSet::new(half_width, profiles, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_and_round_trip() {
        let g = Grid::new(5).unwrap();
        let profiles = make_voltage_profiles(2, 0.1, &g).unwrap();
        let outputs = Outputs::new(
            &g,
            MeasurementKind::PointwiseUnipolar,
            vec![vec![0.1, -2.5, 1e-20, 3.0, 1.0 / 3.0], vec![0.0; 5]],
        )
        .unwrap();
        let set = MeasurementSet::new(0.1, profiles, outputs).unwrap();
        let text = set.to_json();
        assert!(text.contains("\"N\":2"));
        assert!(text.contains("3.3333333333333331e-1"));
        let back = MeasurementSet::from_json(&text, &g).unwrap();
        assert_eq!(back, set);

        let avg = Outputs::new(&g, MeasurementKind::AveragedUnipolar, vec![vec![-0.75]]).unwrap();
        let set =
            MeasurementSet::new(0.2, make_voltage_profiles(1, 0.2, &g).unwrap(), avg).unwrap();
        let v: Value = serde_json::from_str(&set.to_json()).unwrap();
        assert_eq!(v["outputs"][0].as_f64(), Some(-0.75));
        assert_eq!(MeasurementSet::from_json(&set.to_json(), &g).unwrap(), set);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let g = Grid::new(5).unwrap();
        assert!(MeasurementSet::from_json("[]", &g).is_err());
        assert!(MeasurementSet::from_json(
            r#"{"kind":"bogus","N":1,"half_width":0.1,"outputs":[1]}"#,
            &g
        )
        .is_err());
        assert!(MeasurementSet::from_json(
            r#"{"kind":"averaged_unipolar","N":2,"half_width":0.1,"outputs":[1]}"#,
            &g
        )
        .is_err());
    }
}
