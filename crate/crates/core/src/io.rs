//! Line-oriented instance and labeling files.
//!
//! Each file is JSON lines: a header object first, then one object per
//! label (or per selected index). Unknown fields are rejected. Orientations
//! are stored in degrees and converted to radians while parsing.
//!
//! ```text
//! {"format":"mris-instance","version":1,"id":"demo","model":"fp"}
//! {"id":0,"x":0.0,"y":0.0,"length":1.0,"anchor_offset":0.0,"orientation_deg":270.0}
//! {"id":1,"x":1.0,"y":-0.5,"length":1.0}
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, RotatingSegment};
use crate::model::{AnchorModel, Instance, Labeling};

pub const INSTANCE_FORMAT: &str = "mris-instance";
pub const LABELING_FORMAT: &str = "mris-labeling";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceHeader {
    format: String,
    version: u32,
    #[serde(default)]
    id: String,
    model: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelRecord {
    id: usize,
    x: f64,
    y: f64,
    length: f64,
    #[serde(default)]
    anchor_offset: f64,
    #[serde(default)]
    orientation_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelingHeader {
    format: String,
    version: u32,
    #[serde(default)]
    instance: String,
    size: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectionRecord {
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor_offset: Option<f64>,
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_line<T: DeserializeOwned>(line: usize, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(line, e.to_string()))
}

fn check_header(line: usize, format: &str, version: u32, expected: &str) -> Result<()> {
    if format != expected {
        return Err(Error::parse(
            line,
            format!("expected format {expected:?}, found {format:?}"),
        ));
    }
    if version != FORMAT_VERSION {
        return Err(Error::parse(
            line,
            format!("unsupported version {version}, this build reads version {FORMAT_VERSION}"),
        ));
    }
    Ok(())
}

/// Degrees whose conversion to radians gives back `radians` exactly, if any
/// value near the plain conversion does.
pub fn radians_to_file_degrees(radians: f64) -> f64 {
    let approx = radians.to_degrees();
    let rounded = approx.round();
    if rounded.to_radians() == radians {
        return rounded;
    }
    let (mut up, mut down) = (approx, approx);
    for _ in 0..64 {
        if up.to_radians() == radians {
            return up;
        }
        if down.to_radians() == radians {
            return down;
        }
        up = up.next_up();
        down = down.next_down();
    }
    approx
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or(Error::parse(1, "missing header line"))?;
    let header: InstanceHeader = parse_line(hline, htext)?;
    check_header(hline, &header.format, header.version, INSTANCE_FORMAT)?;
    let model: AnchorModel = header
        .model
        .parse()
        .map_err(|e: Error| Error::parse(hline, e.to_string()))?;

    let mut labels = Vec::new();
    for (line, text) in lines {
        let r: LabelRecord = parse_line(line, text)?;
        if r.id != labels.len() {
            return Err(Error::parse(
                line,
                format!(
                    "label id {} out of sequence, expected {}",
                    r.id,
                    labels.len()
                ),
            ));
        }
        if !(0.0..360.0).contains(&r.orientation_deg) {
            return Err(Error::parse(
                line,
                format!("orientation_deg {} outside [0, 360)", r.orientation_deg),
            ));
        }
        let label = RotatingSegment::new(
            Point::new(r.x, r.y),
            r.length,
            r.anchor_offset,
            r.orientation_deg.to_radians(),
        )
        .map_err(|e| Error::parse(line, e.to_string()))?;
        model
            .admits(&label)
            .map_err(|msg| Error::parse(line, format!("label {}: {msg}", r.id)))?;
        labels.push(label);
    }
    Instance::with_metadata(header.id, model, labels, header.metadata)
}

pub fn emit_instance(instance: &Instance) -> Result<String> {
    let header = InstanceHeader {
        format: INSTANCE_FORMAT.into(),
        version: FORMAT_VERSION,
        id: instance.id().into(),
        model: instance.model().as_str().into(),
        metadata: instance.metadata().clone(),
    };
    let mut out = to_line(&header)?;
    for (id, l) in instance.labels().iter().enumerate() {
        let record = LabelRecord {
            id,
            x: l.anchor.x,
            y: l.anchor.y,
            length: l.length,
            anchor_offset: l.anchor_offset,
            orientation_deg: radians_to_file_degrees(l.orientation),
        };
        out.push_str(&to_line(&record)?);
    }
    Ok(out)
}

fn to_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_labeling(text: &str) -> Result<Labeling> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or(Error::parse(1, "missing header line"))?;
    let header: LabelingHeader = parse_line(hline, htext)?;
    check_header(hline, &header.format, header.version, LABELING_FORMAT)?;
    let mut labeling = Labeling::default();
    for (line, text) in lines {
        let r: SelectionRecord = parse_line(line, text)?;
        if !labeling.selected.insert(r.index) {
            return Err(Error::parse(
                line,
                format!("index {} listed twice", r.index),
            ));
        }
        if let Some(offset) = r.anchor_offset {
            labeling.anchor_choice.insert(r.index, offset);
        }
    }
    if labeling.len() != header.size {
        return Err(Error::parse(
            hline,
            format!(
                "header declares {} entries, file lists {}",
                header.size,
                labeling.len()
            ),
        ));
    }
    Ok(labeling)
}

pub fn emit_labeling(labeling: &Labeling, instance_id: &str) -> Result<String> {
    let header = LabelingHeader {
        format: LABELING_FORMAT.into(),
        version: FORMAT_VERSION,
        instance: instance_id.into(),
        size: labeling.len(),
    };
    let mut out = to_line(&header)?;
    for &index in &labeling.selected {
        let record = SelectionRecord {
            index,
            anchor_offset: labeling.anchor_choice.get(&index).copied(),
        };
        out.push_str(&to_line(&record)?);
    }
    Ok(out)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn read_labeling(path: &Path) -> Result<Labeling> {
    parse_labeling(&std::fs::read_to_string(path)?)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const SAMPLE: &str = r#"{"format":"mris-instance","version":1,"id":"demo","model":"fp"}
{"id":0,"x":0.0,"y":0.0,"length":1.0,"anchor_offset":0.0,"orientation_deg":270.0}

{"id":1,"x":1.0,"y":-0.5,"length":1.0}
"#;

    #[test]
    fn parses_sample() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.id(), "demo");
        assert_eq!(inst.model(), AnchorModel::FixedPosition);
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.labels()[0].orientation, 270f64.to_radians());
        assert!((inst.labels()[0].orientation - 1.5 * PI).abs() < 1e-15);
        assert_eq!(inst.labels()[1].orientation, 0.0);
        assert_eq!(
            parse_instance(&emit_instance(&inst).unwrap()).unwrap(),
            inst
        );
    }

    fn parse_err_line(text: &str) -> usize {
        match parse_instance(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let head = r#"{"format":"mris-instance","version":1,"model":"1p"}"#;
        assert_eq!(parse_err_line(""), 1);
        assert_eq!(
            parse_err_line(r#"{"format":"mris-instance","version":2,"model":"1p"}"#),
            1
        );
        assert_eq!(
            parse_err_line(r#"{"format":"mris-instance","version":1,"model":"3p"}"#),
            1
        );
        assert_eq!(
            parse_err_line(r#"{"format":"other","version":1,"model":"1p"}"#),
            1
        );
        assert_eq!(
            parse_err_line(r#"{"format":"mris-instance","version":1,"model":"1p","extra":1}"#),
            1
        );
        let unknown = format!(
            "{head}\n{}\n",
            r#"{"id":0,"x":0,"y":0,"length":1,"colour":"red"}"#
        );
        assert_eq!(parse_err_line(&unknown), 2);
        let gap = format!(
            "{head}\n{}\n{}\n",
            r#"{"id":0,"x":0,"y":0,"length":1}"#, r#"{"id":2,"x":0,"y":0,"length":1}"#
        );
        assert_eq!(parse_err_line(&gap), 3);
        let offset = format!(
            "{}\n{}\n",
            r#"{"format":"mris-instance","version":1,"model":"fp"}"#,
            r#"{"id":0,"x":0,"y":0,"length":1,"anchor_offset":1.5}"#
        );
        assert_eq!(parse_err_line(&offset), 2);
        let not_bottom = format!(
            "{head}\n{}\n",
            r#"{"id":0,"x":0,"y":0,"length":1,"anchor_offset":0.5}"#
        );
        assert_eq!(parse_err_line(&not_bottom), 2);
        let angle = format!(
            "{}\n{}\n",
            r#"{"format":"mris-instance","version":1,"model":"fp"}"#,
            r#"{"id":0,"x":0,"y":0,"length":1,"orientation_deg":360}"#
        );
        assert_eq!(parse_err_line(&angle), 2);
    }

    #[test]
    fn labeling_round_trip() {
        let mut lab = Labeling::new([0, 3, 7]);
        lab.anchor_choice.insert(3, 0.5);
        let text = emit_labeling(&lab, "x").unwrap();
        assert_eq!(parse_labeling(&text).unwrap(), lab);
        let dup = "{\"format\":\"mris-labeling\",\"version\":1,\"size\":2}\n{\"index\":1}\n{\"index\":1}\n";
        assert!(matches!(
            parse_labeling(dup),
            Err(Error::Parse { line: 3, .. })
        ));
        let short = "{\"format\":\"mris-labeling\",\"version\":1,\"size\":2}\n{\"index\":1}\n";
        assert!(matches!(
            parse_labeling(short),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn integer_degrees_round_trip() {
        for d in 0..360 {
            let r = (d as f64).to_radians();
            assert_eq!(radians_to_file_degrees(r), d as f64);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    proptest! {
        #[test]
        fn instances_round_trip(
            raw in prop::collection::vec(
                (-1e3..1e3f64, -1e3..1e3f64, 0.01..50.0f64, 0.0..1.0f64, 0.0..360.0f64),
                0..12,
            ),
            model in prop::sample::select(vec!["1p", "2p", "sliding", "fp"]),
        ) {
            let model: AnchorModel = model.parse().unwrap();
            let labels = raw
                .iter()
                .map(|&(x, y, len, frac, deg)| match model {
                    AnchorModel::FixedPosition => {
                        RotatingSegment::new(Point::new(x, y), len, len * frac, deg.to_radians()).unwrap()
                    }
                    _ => RotatingSegment::bottom_anchored(Point::new(x, y), len).unwrap(),
                })
                .collect();
            let mut meta = BTreeMap::new();
            meta.insert("seed".to_string(), "7".to_string());
            let inst = Instance::with_metadata("p", model, labels, meta).unwrap();
            let back = parse_instance(&emit_instance(&inst).unwrap()).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
