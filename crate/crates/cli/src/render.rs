//! SVG picture of a two-variable coamoeba on the unit square of argument
//! coordinates: the coamoeba dark, the open zonotopes white.

use std::fmt::Write as _;

use coamoeba_core::coamoeba::{arrangement, conjugation_action};
use coamoeba_core::exactmath::{snf, IntMatrix};
use coamoeba_core::model::NormalizedModel;
use coamoeba_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

pub struct RenderOptions {
    pub size: u32,
    pub show_centers: bool,
    pub show_conjugation: bool,
}

type Point = [BigRational; 2];

fn apply(h: &IntMatrix, p: &Point) -> Point {
    let row = |i: usize| {
        BigRational::from_integer(h.get(i, 0).clone()) * &p[0] + BigRational::from_integer(h.get(i, 1).clone()) * &p[1]
    };
    [row(0), row(1)]
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

struct Canvas {
    size: f64,
}

impl Canvas {
    fn x(&self, x: &BigRational) -> String {
        format!("{:.3}", f(x) * self.size)
    }

    fn y(&self, y: &BigRational) -> String {
        format!("{:.3}", (1.0 - f(y)) * self.size)
    }
}

fn label(alpha: &[u64]) -> String {
    alpha.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn render_svg(model: &NormalizedModel, opts: &RenderOptions) -> Result<String> {
    if model.n != 2 {
        return Err(Error::UnsupportedDimension {
            n: model.n,
            supported: "2",
        });
    }
    if opts.size == 0 {
        return Err(Error::InvalidInput("image size must be positive".into()));
    }
    let dec = snf(&model.a)?;
    let arr = arrangement(model, &dec)?;
    let h = &dec.h;
    let c = Canvas {
        size: f64::from(opts.size),
    };
    let s = opts.size;
    let signs: Vec<&str> = model
        .epsilon
        .iter()
        .map(|e| if e.as_i8() > 0 { "+" } else { "-" })
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    );
    let _ = writeln!(
        out,
        "<title>coamoeba: A = {}, epsilon = ({}), D = ({})</title>",
        model.a,
        signs.join(","),
        label(&arr.d)
    );
    let _ = writeln!(out, "<defs>");
    let _ = writeln!(
        out,
        r#"<clipPath id="torus"><rect x="0" y="0" width="{s}" height="{s}"/></clipPath>"#
    );
    if opts.show_conjugation {
        let _ = writeln!(
            out,
            r##"<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#d62728"/></marker>"##
        );
    }
    let _ = writeln!(out, "</defs>");
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{s}" height="{s}" fill="#1b1b1b"/>"##);

    // every lift of every zonogon that meets the unit square
    let _ = writeln!(
        out,
        r##"<g clip-path="url(#torus)" fill="#ffffff" stroke="#8c8c8c" stroke-width="1" stroke-linejoin="round">"##
    );
    let unit = BigRational::from_integer(1.into());
    for alpha in arr.indices()? {
        let z = arr.zonotope(&alpha)?;
        let verts: Vec<Point> = z.zonogon_vertices()?.iter().map(|v| apply(h, v)).collect();
        let min = |k: usize| verts.iter().map(|v| v[k].clone()).min().expect("zonogon has vertices");
        let max = |k: usize| verts.iter().map(|v| v[k].clone()).max().expect("zonogon has vertices");
        let (x0, x1, y0, y1) = (min(0), max(0), min(1), max(1));
        // translates t with (polygon + t) ∩ (0,1)² ≠ ∅ in the bounding-box sense
        let tx_lo = (-&x1).floor().to_integer();
        let tx_hi = (&unit - &x0).ceil().to_integer();
        let ty_lo = (-&y1).floor().to_integer();
        let ty_hi = (&unit - &y0).ceil().to_integer();
        let mut tx = tx_lo.clone();
        while tx <= tx_hi {
            let mut ty = ty_lo.clone();
            while ty <= ty_hi {
                let shift = [BigRational::from_integer(tx.clone()), BigRational::from_integer(ty.clone())];
                let overlaps = &x1 + &shift[0] > BigRational::from_integer(0.into())
                    && &x0 + &shift[0] < unit
                    && &y1 + &shift[1] > BigRational::from_integer(0.into())
                    && &y0 + &shift[1] < unit;
                if overlaps {
                    let points: Vec<String> = verts
                        .iter()
                        .map(|v| format!("{},{}", c.x(&(&v[0] + &shift[0])), c.y(&(&v[1] + &shift[1]))))
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polygon data-alpha="{}" points="{}"/>"#,
                        label(&alpha),
                        points.join(" ")
                    );
                }
                ty += BigInt::from(1);
            }
            tx += BigInt::from(1);
        }
    }
    let _ = writeln!(out, "</g>");

    let center_of = |alpha: &[u64]| -> Result<Point> {
        let cen = arr.center(alpha)?;
        let p = apply(h, &[cen[0].clone(), cen[1].clone()]);
        Ok([frac(&p[0]), frac(&p[1])])
    };
    if opts.show_conjugation {
        let action = conjugation_action(&arr)?;
        let _ = writeln!(
            out,
            r##"<g stroke="#d62728" stroke-width="1.5" fill="none">"##
        );
        for (a, &ca) in action.mapping.iter().enumerate() {
            let alpha = arr.unflatten(a);
            let p = center_of(&alpha)?;
            if a == ca {
                let _ = writeln!(
                    out,
                    r#"<circle data-alpha="{}" cx="{}" cy="{}" r="7"/>"#,
                    label(&alpha),
                    c.x(&p[0]),
                    c.y(&p[1])
                );
            } else {
                let q = center_of(&arr.unflatten(ca))?;
                let _ = writeln!(
                    out,
                    r#"<line data-alpha="{}" x1="{}" y1="{}" x2="{}" y2="{}" marker-end="url(#arrow)"/>"#,
                    label(&alpha),
                    c.x(&p[0]),
                    c.y(&p[1]),
                    c.x(&q[0]),
                    c.y(&q[1])
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }
    if opts.show_centers {
        let _ = writeln!(out, r##"<g fill="#1f77b4">"##);
        for alpha in arr.indices()? {
            let p = center_of(&alpha)?;
            let _ = writeln!(
                out,
                r#"<circle data-alpha="{}" cx="{}" cy="{}" r="3"/>"#,
                label(&alpha),
                c.x(&p[0]),
                c.y(&p[1])
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{s}" height="{s}" fill="none" stroke="#000000" stroke-width="2"/>"##
    );
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
