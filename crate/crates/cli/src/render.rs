//! Deterministic SVG and PPM renderings of disks, axis lines and points.

use std::cmp::Ordering;
use std::fmt::Write;

use kleinian_core::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk { center: Complex64, radius: f64, depth: usize },
    /// The vertical line `Re z = x`, drawn across the view.
    VerticalLine { x: f64, depth: usize },
    Point { at: Complex64, depth: usize },
}

impl Shape {
    fn depth(&self) -> usize {
        match *self {
            Shape::Disk { depth, .. } | Shape::VerticalLine { depth, .. } | Shape::Point { depth, .. } => depth,
        }
    }

    /// Lines first, then disks, then points; within a kind by position.
    fn key(&self) -> (usize, u8, [f64; 3]) {
        match *self {
            Shape::VerticalLine { x, depth } => (depth, 0, [x, 0.0, 0.0]),
            Shape::Disk { center, radius, depth } => (depth, 1, [center.re, center.im, radius]),
            Shape::Point { at, depth } => (depth, 2, [at.re, at.im, 0.0]),
        }
    }

    fn within(&self, v: &View) -> bool {
        match *self {
            Shape::Disk { center, radius, .. } => {
                center.re - radius >= v.x_min && center.re + radius <= v.x_max && center.im - radius >= v.y_min && center.im + radius <= v.y_max
            }
            Shape::VerticalLine { x, .. } => x >= v.x_min && x <= v.x_max,
            Shape::Point { at, .. } => at.re >= v.x_min && at.re <= v.x_max && at.im >= v.y_min && at.im <= v.y_max,
        }
    }
}

fn sorted(shapes: &[Shape]) -> Vec<Shape> {
    let mut out = shapes.to_vec();
    out.sort_by(|a, b| {
        let (ka, kb) = (a.key(), b.key());
        ka.0.cmp(&kb.0).then(ka.1.cmp(&kb.1)).then_with(|| {
            ka.2.iter().zip(kb.2.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
        })
    });
    out
}

/// Region of the plane shown, in mathematical orientation (`y` up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl View {
    pub fn square(half: f64) -> Self {
        View { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    /// Bounding box of the disks, padded by `pad` times the larger side.
    pub fn around(shapes: &[Shape], pad: f64) -> Self {
        let mut v = View { x_min: f64::INFINITY, x_max: f64::NEG_INFINITY, y_min: f64::INFINITY, y_max: f64::NEG_INFINITY };
        for s in shapes {
            let (c, r) = match *s {
                Shape::Disk { center, radius, .. } => (center, radius),
                Shape::Point { at, .. } => (at, 0.0),
                Shape::VerticalLine { x, .. } => (Complex64::new(x, 0.0), 0.0),
            };
            v.x_min = v.x_min.min(c.re - r);
            v.x_max = v.x_max.max(c.re + r);
            v.y_min = v.y_min.min(c.im - r);
            v.y_max = v.y_max.max(c.im + r);
        }
        if !v.x_min.is_finite() {
            return View::square(1.0);
        }
        let side = (v.x_max - v.x_min).max(v.y_max - v.y_min).max(1e-12);
        View { x_min: v.x_min - pad * side, x_max: v.x_max + pad * side, y_min: v.y_min - pad * side, y_max: v.y_max + pad * side }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

const PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [23, 190, 207],
];

pub fn depth_color(depth: usize) -> [u8; 3] {
    PALETTE[depth % PALETTE.len()]
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Shortest round-trip decimal, without negative zero.
fn num(x: f64) -> String {
    if x == 0.0 { "0".to_string() } else { format!("{x}") }
}

/// Count of shapes not entirely inside the view.
pub fn outside_view(shapes: &[Shape], view: &View) -> usize {
    shapes.iter().filter(|s| !s.within(view)).count()
}

/// SVG in plane coordinates, with `y` flipped so that `Im z` points up.
/// Elements are sorted by depth, kind and position, so equal inputs give
/// equal bytes whatever their order.
pub fn render_svg(shapes: &[Shape], view: &View, width_px: u32) -> String {
    let height_px = ((width_px as f64) * view.height() / view.width()).round().max(1.0) as u32;
    let stroke = view.width() / width_px as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width_px}\" height=\"{height_px}\" viewBox=\"{} {} {} {}\">",
        num(view.x_min),
        num(-view.y_max),
        num(view.width()),
        num(view.height())
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        num(view.x_min),
        num(-view.y_max),
        num(view.width()),
        num(view.height())
    );
    for s in sorted(shapes) {
        let color = hex(depth_color(s.depth()));
        match s {
            Shape::VerticalLine { x, .. } => {
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"{}\"/>",
                    num(x),
                    num(-view.y_max),
                    num(x),
                    num(-view.y_min),
                    num(stroke)
                );
            }
            Shape::Disk { center, radius, .. } => {
                let _ = writeln!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\" fill-opacity=\"0.25\" stroke=\"{color}\" stroke-width=\"{}\"/>",
                    num(center.re),
                    num(-center.im),
                    num(radius),
                    num(stroke.min(radius / 4.0))
                );
            }
            Shape::Point { at, .. } => {
                let _ = writeln!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>",
                    num(at.re),
                    num(-at.im),
                    num(stroke)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Binary PPM (P6) with disks filled in depth order over a white canvas.
pub fn render_ppm(shapes: &[Shape], view: &View, width_px: u32) -> Vec<u8> {
    let w = width_px.max(1) as usize;
    let h = ((w as f64) * view.height() / view.width()).round().max(1.0) as usize;
    let scale = w as f64 / view.width();
    let mut px = vec![255u8; w * h * 3];
    let mut paint = |i: usize, j: usize, c: [u8; 3]| {
        let o = 3 * (j * w + i);
        px[o..o + 3].copy_from_slice(&c);
    };
    let to_px = |z: Complex64| ((z.re - view.x_min) * scale, (view.y_max - z.im) * scale);
    for s in sorted(shapes) {
        let c = depth_color(s.depth());
        match s {
            Shape::Disk { center, radius, .. } => {
                let (cx, cy) = to_px(center);
                let r = (radius * scale).max(0.5);
                let (i0, i1) = ((cx - r).floor().max(0.0) as usize, ((cx + r).ceil().max(0.0) as usize).min(w));
                let (j0, j1) = ((cy - r).floor().max(0.0) as usize, ((cy + r).ceil().max(0.0) as usize).min(h));
                for j in j0..j1 {
                    for i in i0..i1 {
                        let (dx, dy) = (i as f64 + 0.5 - cx, j as f64 + 0.5 - cy);
                        if dx * dx + dy * dy <= r * r {
                            paint(i, j, c);
                        }
                    }
                }
            }
            Shape::VerticalLine { x, .. } => {
                let i = ((x - view.x_min) * scale).floor();
                if i >= 0.0 && (i as usize) < w {
                    for j in 0..h {
                        paint(i as usize, j, c);
                    }
                }
            }
            Shape::Point { at, .. } => {
                let (x, y) = to_px(at);
                if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                    paint(x as usize, y as usize, c);
                }
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&px);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(x: f64, r: f64, depth: usize) -> Shape {
        Shape::Disk { center: Complex64::new(x, 0.0), radius: r, depth }
    }

    #[test]
    fn empty_canvas_is_valid_svg() {
        let svg = render_svg(&[], &View::square(1.0), 100);
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn element_order_does_not_depend_on_input_order() {
        let a = [disk(0.5, 0.1, 1), Shape::VerticalLine { x: 0.0, depth: 0 }, disk(-0.5, 0.2, 1)];
        let b = [a[2], a[0], a[1]];
        let v = View::square(1.2);
        assert_eq!(render_svg(&a, &v, 200), render_svg(&b, &v, 200));
        assert_eq!(render_ppm(&a, &v, 64), render_ppm(&b, &v, 64));
    }

    #[test]
    fn ppm_header_and_fill() {
        let v = View::square(1.0);
        let img = render_ppm(&[disk(0.0, 0.5, 0)], &v, 10);
        let header = b"P6\n10 10\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(img.len(), header.len() + 300);
        let centre = header.len() + 3 * (5 * 10 + 5);
        assert_eq!(&img[centre..centre + 3], &depth_color(0));
        assert_eq!(&img[header.len()..header.len() + 3], &[255, 255, 255]);
    }

    #[test]
    fn view_containment() {
        let v = View::square(1.0);
        assert_eq!(outside_view(&[disk(0.0, 0.5, 0), disk(0.9, 0.2, 0)], &v), 1);
        let around = View::around(&[disk(3.0, 1.0, 0)], 0.0);
        assert_eq!((around.x_min, around.x_max), (2.0, 4.0));
    }
}
