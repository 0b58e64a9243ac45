//! SVG figures of an instance and, optionally, a labeling.

use svg::node::element::{Circle, Group, Line, Rectangle};
use svg::Document;

use crate::geometry::RotatingSegment;
use crate::model::{Instance, Labeling};

const MARGIN: f64 = 0.1;

/// Draws anchors as dots, sweep disks as dashed circles and labels at
/// rotation phase zero. With a labeling, selected labels are solid and the
/// rest dimmed. The y axis points up.
pub fn render_svg(instance: &Instance, labeling: Option<&Labeling>) -> String {
    let disks = instance.sweep_disks();
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    if !disks.is_empty() {
        lo_x = disks
            .iter()
            .map(|d| d.centre.x - d.radius)
            .fold(f64::INFINITY, f64::min);
        lo_y = disks
            .iter()
            .map(|d| d.centre.y - d.radius)
            .fold(f64::INFINITY, f64::min);
        hi_x = disks
            .iter()
            .map(|d| d.centre.x + d.radius)
            .fold(f64::NEG_INFINITY, f64::max);
        hi_y = disks
            .iter()
            .map(|d| d.centre.y + d.radius)
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE);
    let pad = span * MARGIN;
    let (vx, vy) = (lo_x - pad, -hi_y - pad);
    let (vw, vh) = (hi_x - lo_x + 2.0 * pad, hi_y - lo_y + 2.0 * pad);
    let stroke = span / 300.0;

    let frame = Rectangle::new()
        .set("x", vx)
        .set("y", vy)
        .set("width", vw)
        .set("height", vh)
        .set("fill", "white")
        .set("stroke", "black")
        .set("stroke-width", stroke);

    let mut circles = Group::new()
        .set("id", "sweep-disks")
        .set("fill", "none")
        .set("stroke", "steelblue")
        .set("stroke-width", stroke)
        .set(
            "stroke-dasharray",
            format!("{} {}", 4.0 * stroke, 3.0 * stroke),
        );
    let mut anchors = Group::new().set("id", "anchors").set("fill", "black");
    let mut segments = Group::new()
        .set("id", "labels")
        .set("stroke-width", 2.0 * stroke);

    for (i, (label, disk)) in instance.labels().iter().zip(&disks).enumerate() {
        circles = circles.add(
            Circle::new()
                .set("cx", disk.centre.x)
                .set("cy", -disk.centre.y)
                .set("r", disk.radius),
        );
        anchors = anchors.add(
            Circle::new()
                .set("cx", label.anchor.x)
                .set("cy", -label.anchor.y)
                .set("r", 3.0 * stroke),
        );
        let selected = labeling.is_none_or(|l| l.selected.contains(&i));
        let placed = labeling
            .and_then(|l| l.anchor_choice.get(&i))
            .and_then(|&offset| {
                RotatingSegment::new(label.anchor, label.length, offset, label.orientation).ok()
            })
            .unwrap_or(*label);
        let (a, b) = placed.endpoints_at(0.0);
        let mut line = Line::new()
            .set("x1", a.x)
            .set("y1", -a.y)
            .set("x2", b.x)
            .set("y2", -b.y)
            .set("data-index", i);
        line = if selected {
            line.set("stroke", "black")
        } else {
            line.set("stroke", "grey").set("stroke-opacity", 0.3)
        };
        segments = segments.add(line);
    }

    Document::new()
        .set("viewBox", (vx, vy, vw, vh))
        .set("width", 800)
        .set("height", (800.0 * vh / vw).round())
        .add(frame)
        .add(circles)
        .add(segments)
        .add(anchors)
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::AnchorModel;
    use std::f64::consts::PI;

    fn count(doc: &roxmltree::Document, group: &str) -> usize {
        doc.descendants()
            .find(|n| n.attribute("id") == Some(group))
            .map_or(0, |g| g.children().filter(|c| c.is_element()).count())
    }

    #[test]
    fn empty_instance_has_only_the_frame() {
        let inst = Instance::new("e", AnchorModel::OneP, vec![]).unwrap();
        let text = render_svg(&inst, None);
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(
            doc.descendants().filter(|n| n.has_tag_name("rect")).count(),
            1
        );
        assert_eq!(
            doc.descendants()
                .filter(|n| n.has_tag_name("circle"))
                .count(),
            0
        );
        assert_eq!(
            doc.descendants().filter(|n| n.has_tag_name("line")).count(),
            0
        );
    }

    #[test]
    fn pair_figure() {
        let labels = vec![
            RotatingSegment::new(Point::new(0.0, 0.0), 1.0, 0.0, 1.5 * PI).unwrap(),
            RotatingSegment::bottom_anchored(Point::new(1.0, -0.5), 1.0).unwrap(),
        ];
        let inst = Instance::new("pair", AnchorModel::FixedPosition, labels).unwrap();
        let lab = Labeling::new([0]);
        let text = render_svg(&inst, Some(&lab));
        assert_eq!(text, render_svg(&inst, Some(&lab)));
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(count(&doc, "sweep-disks"), 2);
        assert_eq!(count(&doc, "anchors"), 2);
        assert_eq!(count(&doc, "labels"), 2);
        let dimmed = doc
            .descendants()
            .filter(|n| n.has_tag_name("line") && n.attribute("stroke") == Some("grey"))
            .count();
        assert_eq!(dimmed, 1);
        let dashed = doc
            .descendants()
            .find(|n| n.attribute("id") == Some("sweep-disks"))
            .unwrap();
        assert!(dashed.attribute("stroke-dasharray").is_some());
    }
}
