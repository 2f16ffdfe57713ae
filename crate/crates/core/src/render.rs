//! SVG rendering. The one floating-point corner of the crate: path
//! coordinates are f64 approximations of exact data and nothing here feeds
//! back into a decision procedure.

use std::fmt::Write as _;

use crate::instance::Instance;
use crate::num::rational_to_f64;
use crate::partition::PartitionTuple;
use crate::poly::MultiPoly;

const VIEW: f64 = 10.0;
const SIZE: f64 = 800.0;
const GRID: usize = 160;

fn eval_f64(p: &MultiPoly, x: f64, y: f64) -> f64 {
    let mut acc = 0.0;
    for (e, c) in p.terms() {
        acc += rational_to_f64(c) * x.powi(e[0] as i32) * y.powi(e[1] as i32);
    }
    acc
}

fn px(x: f64) -> f64 {
    (x + VIEW) / (2.0 * VIEW) * SIZE
}

fn py(y: f64) -> f64 {
    (VIEW - y) / (2.0 * VIEW) * SIZE
}

/// Path data for the zero set of p, marched over sign changes on a fixed
/// grid. Ambiguous saddle cells are split arbitrarily; this is a picture,
/// not a certificate.
fn march(p: &MultiPoly) -> String {
    let step = 2.0 * VIEW / GRID as f64;
    let mut d = String::new();
    let mut vals = vec![[0.0f64; GRID + 1]; GRID + 1];
    for (i, row) in vals.iter_mut().enumerate() {
        let x = -VIEW + i as f64 * step;
        for (j, v) in row.iter_mut().enumerate() {
            *v = eval_f64(p, x, -VIEW + j as f64 * step);
        }
    }
    let lerp = |a: f64, fa: f64, b: f64, fb: f64| -> f64 {
        if (fb - fa).abs() < f64::EPSILON {
            (a + b) / 2.0
        } else {
            a + (b - a) * (-fa) / (fb - fa)
        }
    };
    for i in 0..GRID {
        let x0 = -VIEW + i as f64 * step;
        let x1 = x0 + step;
        for j in 0..GRID {
            let y0 = -VIEW + j as f64 * step;
            let y1 = y0 + step;
            let f = [vals[i][j], vals[i + 1][j], vals[i + 1][j + 1], vals[i][j + 1]];
            if f.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let mut pts: Vec<(f64, f64)> = Vec::with_capacity(4);
            if f[0] * f[1] < 0.0 {
                pts.push((lerp(x0, f[0], x1, f[1]), y0));
            }
            if f[1] * f[2] < 0.0 {
                pts.push((x1, lerp(y0, f[1], y1, f[2])));
            }
            if f[3] * f[2] < 0.0 {
                pts.push((lerp(x0, f[3], x1, f[2]), y1));
            }
            if f[0] * f[3] < 0.0 {
                pts.push((x0, lerp(y0, f[0], y1, f[3])));
            }
            for pair in pts.chunks(2) {
                if let [a, b] = pair {
                    let _ = write!(
                        d,
                        "M{:.2} {:.2}L{:.2} {:.2}",
                        px(a.0),
                        py(a.1),
                        px(b.0),
                        py(b.1)
                    );
                }
            }
        }
    }
    d
}

fn marker(x: f64, y: f64) -> String {
    let (cx, cy) = (px(x), py(y));
    format!(
        "M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}",
        cx - 4.0,
        cy,
        cx + 4.0,
        cy,
        cx,
        cy - 4.0,
        cx,
        cy + 4.0
    )
}

const PALETTE: &[&str] = &[
    "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// One path per set (dim-0 sets become cross markers, everything else the
/// marched zero curve of its first atom), plus one path per tuple
/// polynomial when a partition is supplied.
pub fn render_svg(instance: &Instance, tuple: Option<&PartitionTuple>) -> String {
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {s} {s}\" width=\"{s}\" height=\"{s}\">",
        s = SIZE as u32
    );
    let _ = write!(
        svg,
        "<rect width=\"{s}\" height=\"{s}\" fill=\"#ffffff\"/>",
        s = SIZE as u32
    );
    for (i, set) in instance.sets.iter().enumerate() {
        let d = match set.as_point() {
            Some((x, y)) => marker(rational_to_f64(&x), rational_to_f64(&y)),
            None => set.polys.first().map(march).unwrap_or_default(),
        };
        let _ = write!(
            svg,
            "<path class=\"set\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" d=\"{}\"/>",
            PALETTE[i % PALETTE.len()],
            d
        );
    }
    if let Some(t) = tuple {
        for p in t.polys() {
            let _ = write!(
                svg,
                "<path class=\"tuple\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" d=\"{}\"/>",
                march(p)
            );
        }
    }
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_instance;

    #[test]
    fn empty_instance_renders_an_empty_canvas() {
        let inst = gen_instance("points", 0, 0, 8).unwrap();
        let svg = render_svg(&inst, None);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert_eq!(svg.matches("<path").count(), 0);
    }

    #[test]
    fn path_count_tracks_sets_and_tuple() {
        let inst = gen_instance("circles", 5, 3, 4).unwrap();
        let svg = render_svg(&inst, None);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 5);
        // circles inside the viewport produce visible strokes
        assert!(svg.matches('L').count() > 5);

        let cfg = crate::partition::PartitionConfig {
            seed: 1,
            ..Default::default()
        };
        let outcome = crate::partition::build_partition(&inst.sets, &cfg).unwrap();
        let svg = render_svg(&inst, Some(&outcome.tuple));
        assert_eq!(
            svg.matches("<path").count(),
            5 + outcome.tuple.polys().len()
        );
    }

    #[test]
    fn point_sets_render_as_markers() {
        let inst = gen_instance("points", 3, 9, 8).unwrap();
        let svg = render_svg(&inst, None);
        assert_eq!(svg.matches("<path").count(), 3);
    }
}
