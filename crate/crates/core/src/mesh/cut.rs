//! Splitting convex cells along straight cut lines.

use crate::geometry::{Point2, Segment};

/// Supporting line of one or more collinear cut segments, with the parameter
/// intervals (along `dir`, measured from `origin`) that the segments cover.
#[derive(Clone, Debug)]
pub(crate) struct CutLine {
    pub origin: Point2,
    pub dir: Point2,
    pub intervals: Vec<(f64, f64)>,
}

impl CutLine {
    fn param(&self, p: Point2) -> f64 {
        (p - self.origin).dot(self.dir)
    }

    fn signed_distance(&self, p: Point2) -> f64 {
        self.dir.cross(p - self.origin)
    }
}

pub(crate) enum Coverage {
    Disjoint,
    Full,
    Partial { t: f64 },
}

impl CutLine {
    fn coverage(&self, t0: f64, t1: f64, tol: f64) -> Coverage {
        if self.intervals.iter().any(|&(a, b)| a <= t0 + tol && b >= t1 - tol) {
            return Coverage::Full;
        }
        match self.intervals.iter().find(|&&(a, b)| b > t0 + tol && a < t1 - tol) {
            None => Coverage::Disjoint,
            Some(&(a, b)) => Coverage::Partial { t: if a > t0 + tol { a } else { b } },
        }
    }

    pub fn point(&self, t: f64) -> Point2 {
        self.origin + self.dir * t
    }
}

/// Merges collinear segments into cut lines with sorted, disjoint coverage intervals.
pub(crate) fn group_cut_lines(segments: &[Segment], tol: f64) -> Vec<CutLine> {
    let mut lines: Vec<CutLine> = Vec::new();
    for seg in segments {
        let mut dir = seg.direction();
        if dir.x < -tol || (dir.x.abs() <= tol && dir.y < 0.0) {
            dir = -dir;
        }
        let existing = lines.iter_mut().find(|l| l.dir.cross(dir).abs() <= tol && l.signed_distance(seg.a).abs() <= tol);
        let line = match existing {
            Some(l) => l,
            None => {
                lines.push(CutLine { origin: seg.a, dir, intervals: Vec::new() });
                lines.last_mut().unwrap()
            }
        };
        let (ta, tb) = (line.param(seg.a), line.param(seg.b));
        line.intervals.push((ta.min(tb), ta.max(tb)));
    }
    for line in &mut lines {
        line.intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in &line.intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        line.intervals = merged;
    }
    lines
}

pub(crate) enum Split {
    Untouched,
    Pieces(Vec<Point2>, Vec<Point2>),
    /// The line only partially crosses the cell: a cut ends strictly inside it.
    Dangling(Point2),
}

/// Splits a convex counter-clockwise polygon along `line` when the covered part of
/// the line crosses it completely.
pub(crate) fn split_polygon(poly: &[Point2], line: &CutLine, tol: f64) -> Split {
    let sd: Vec<f64> = poly
        .iter()
        .map(|&p| {
            let d = line.signed_distance(p);
            if d.abs() <= tol {
                0.0
            } else {
                d
            }
        })
        .collect();
    if !(sd.iter().any(|&d| d > 0.0) && sd.iter().any(|&d| d < 0.0)) {
        return Split::Untouched;
    }
    let n = poly.len();
    let mut left = Vec::with_capacity(n + 2);
    let mut right = Vec::with_capacity(n + 2);
    let mut chord = Vec::with_capacity(2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, q) = (poly[i], poly[j]);
        let (dp, dq) = (sd[i], sd[j]);
        if dp >= 0.0 {
            left.push(p);
        }
        if dp <= 0.0 {
            right.push(p);
        }
        if dp == 0.0 {
            chord.push(p);
        }
        if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
            // parametrize the crossing on the line itself so neighbouring cells agree
            let x = p + (q - p) * (dp / (dp - dq));
            let x = line.point(line.param(x));
            left.push(x);
            right.push(x);
            chord.push(x);
        }
    }
    let ts: Vec<f64> = chord.iter().map(|&p| line.param(p)).collect();
    let t0 = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let t1 = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match line.coverage(t0, t1, tol) {
        Coverage::Disjoint => Split::Untouched,
        Coverage::Partial { t } => Split::Dangling(line.point(t)),
        Coverage::Full => Split::Pieces(left, right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::signed_area;

    fn square() -> Vec<Point2> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    #[test]
    fn diagonal_split_gives_two_triangles() {
        let lines = group_cut_lines(&[Segment::new(Point2::new(-1.0, -1.0), Point2::new(2.0, 2.0))], 1e-12);
        match split_polygon(&square(), &lines[0], 1e-12) {
            Split::Pieces(a, b) => {
                assert_eq!(a.len(), 3);
                assert_eq!(b.len(), 3);
                assert!((signed_area(&a) - 0.5).abs() < 1e-15);
                assert!((signed_area(&b) - 0.5).abs() < 1e-15);
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn collinear_segments_merge_and_cover() {
        let segs = [
            Segment::new(Point2::new(0.3, 0.0), Point2::new(0.3, 0.4)),
            Segment::new(Point2::new(0.3, 1.0), Point2::new(0.3, 0.4)),
        ];
        let lines = group_cut_lines(&segs, 1e-12);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].intervals.len(), 1);
        assert!(matches!(split_polygon(&square(), &lines[0], 1e-12), Split::Pieces(..)));
    }

    #[test]
    fn dangling_and_disjoint_cuts() {
        let half = group_cut_lines(&[Segment::new(Point2::new(0.5, -1.0), Point2::new(0.5, 0.5))], 1e-12);
        assert!(matches!(split_polygon(&square(), &half[0], 1e-12), Split::Dangling(_)));
        let away = group_cut_lines(&[Segment::new(Point2::new(0.5, 2.0), Point2::new(0.5, 3.0))], 1e-12);
        assert!(matches!(split_polygon(&square(), &away[0], 1e-12), Split::Untouched));
        let edge = group_cut_lines(&[Segment::new(Point2::new(1.0, 0.0), Point2::new(1.0, 1.0))], 1e-12);
        assert!(matches!(split_polygon(&square(), &edge[0], 1e-12), Split::Untouched));
    }
}
