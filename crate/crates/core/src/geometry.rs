//! Coordinate transforms between particle coordinates (x1, x2) and
//! center-of-mass coordinates (Xc, x), and the polygonal domains cut out by
//! confinement and impenetrability.

use crate::error::{Error, Result};
use crate::quadrature::{rect_rule, sheared_rule, GaussLegendre, WeightedNode};

/// Physical setup shared by every calculation: particle masses, box length,
/// the rectangle scale parameters, and hbar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub m1: f64,
    pub m2: f64,
    pub d: f64,
    pub hbar: f64,
    pub a: f64,
    pub b: f64,
}

impl BoxSpec {
    /// Masses and box length are required; hbar and the rectangle scales
    /// default to 1.
    pub fn new(m1: f64, m2: f64, d: f64) -> Result<Self> {
        let spec = BoxSpec {
            m1,
            m2,
            d,
            hbar: 1.0,
            a: 1.0,
            b: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    /// Rectangle scale parameters a, b (used only by rectangle-shape
    /// computations).
    pub fn with_scales(mut self, a: f64, b: f64) -> Result<Self> {
        self.a = a;
        self.b = b;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m1", self.m1),
            ("m2", self.m2),
            ("d", self.d),
            ("hbar", self.hbar),
            ("a", self.a),
            ("b", self.b),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "BoxSpec.{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Total mass M = m1 + m2.
    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    /// Reduced mass mu = m1 m2 / M.
    pub fn reduced_mass(&self) -> f64 {
        self.m1 * self.m2 / self.total_mass()
    }

    /// Mass carried by the single-particle billiard shapes (square, rhombus,
    /// triangle). The two-particle box uses m1 and m2 separately; the
    /// rectangle uses the scales a, b instead.
    pub fn billiard_mass(&self) -> f64 {
        self.m1
    }

    /// Default absolute tolerance for boundary classification, in length
    /// units.
    pub fn boundary_tol(&self) -> f64 {
        1e-12 * self.d
    }
}

/// A point of whichever 2D plane is in play: (x1, x2), (Xc, x), or (y1, y2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub u: f64,
    pub v: f64,
}

impl Point2 {
    pub fn new(u: f64, v: f64) -> Self {
        Point2 { u, v }
    }
}

/// Classification of a point against a polygon at a given tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// Convex polygon with counterclockwise vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    fn new(vertices: Vec<Point2>) -> Self {
        debug_assert!(vertices.len() >= 3);
        debug_assert!(signed_area(&vertices) > 0.0, "vertices must wind CCW");
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.u = lo.u.min(p.u);
            lo.v = lo.v.min(p.v);
            hi.u = hi.u.max(p.u);
            hi.v = hi.v.max(p.v);
        }
        (lo, hi)
    }

    /// Edges as (start, end) pairs in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed distance to the nearest edge line; positive inside. For a
    /// convex CCW polygon the point is interior iff every edge sees it on
    /// its left.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let mut min = f64::INFINITY;
        for (a, b) in self.edges() {
            let (eu, ev) = (b.u - a.u, b.v - a.v);
            let len = (eu * eu + ev * ev).sqrt();
            // Inward normal of a CCW edge is the left normal.
            let dist = (-(ev) * (p.u - a.u) + eu * (p.v - a.v)) / len;
            min = min.min(dist);
        }
        min
    }

    pub fn contains(&self, p: Point2, tol: f64) -> Region {
        let s = self.signed_distance(p);
        if s > tol {
            Region::Interior
        } else if s < -tol {
            Region::Exterior
        } else {
            Region::Boundary
        }
    }
}

fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.u * b.v - b.u * a.v;
    }
    0.5 * acc
}

/// Center-of-mass transform: Xc = (m1 x1 + m2 x2)/M, x = x1 - x2.
pub fn to_com(x1: f64, x2: f64, spec: &BoxSpec) -> (f64, f64) {
    let m = spec.total_mass();
    ((spec.m1 * x1 + spec.m2 * x2) / m, x1 - x2)
}

/// Inverse transform: x1 = Xc + (m2/M) x, x2 = Xc - (m1/M) x.
pub fn from_com(xc: f64, x: f64, spec: &BoxSpec) -> (f64, f64) {
    let m = spec.total_mass();
    (xc + spec.m2 / m * x, xc - spec.m1 / m * x)
}

/// The domain of (Xc, x) induced by confining both particles to [0, d]:
/// the quadrilateral bounded by Xc + (m2/M) x in {0, d} and
/// Xc - (m1/M) x in {0, d}. With `impenetrable` set (particles cannot pass
/// each other, x1 > x2), only the x >= 0 half is kept and the domain is a
/// triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ComDomain {
    polygon: Polygon,
    spec: BoxSpec,
    pub impenetrable: bool,
}

impl ComDomain {
    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn contains(&self, p: Point2, tol: f64) -> Region {
        self.polygon.contains(p, tol)
    }

    /// Quadrature rule over the domain in (Xc, x) coordinates. The polygon
    /// splits at x = 0 into triangles with Xc limits affine in x; each maps
    /// to a tensor Gauss rule.
    pub fn quad_rule(&self, gl: &GaussLegendre) -> Vec<WeightedNode> {
        let (m1, m2, d) = (self.spec.m1, self.spec.m2, self.spec.d);
        let m = self.spec.total_mass();
        // x in [0, d]: Xc from m1 x / M to d - m2 x / M.
        let mut rule = sheared_rule(
            gl,
            0.0,
            d,
            move |x| m1 * x / m,
            move |x| d - m2 * x / m,
            false,
        );
        if !self.impenetrable {
            // x in [-d, 0]: Xc from -m2 x / M to d + m1 x / M.
            rule.extend(sheared_rule(
                gl,
                -d,
                0.0,
                move |x| -m2 * x / m,
                move |x| d + m1 * x / m,
                false,
            ));
        }
        rule
    }
}

/// Build the COM domain for a box setup.
pub fn com_domain(spec: &BoxSpec, impenetrable: bool) -> ComDomain {
    let d = spec.d;
    let m = spec.total_mass();
    let apex_up = Point2::new(spec.m1 * d / m, d);
    let apex_down = Point2::new(spec.m2 * d / m, -d);
    let vertices = if impenetrable {
        vec![Point2::new(0.0, 0.0), Point2::new(d, 0.0), apex_up]
    } else {
        vec![
            Point2::new(0.0, 0.0),
            apex_down,
            Point2::new(d, 0.0),
            apex_up,
        ]
    };
    ComDomain {
        polygon: Polygon::new(vertices),
        spec: *spec,
        impenetrable,
    }
}

/// The five solvable domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Two particles on [0, d]; configuration space [0, d]^2.
    TwoParticleBox,
    /// Single particle, square [-d, d]^2.
    Square,
    /// Single particle, rhombus |x1 + x2| <= sqrt(2) d, |x1 - x2| <= sqrt(2) d.
    Rhombus,
    /// Single particle, the x1 >= 0 half of the rhombus.
    Triangle,
    /// Single particle, rectangle |y1| <= d sqrt(a), |y2| <= d sqrt(b).
    Rectangle,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::TwoParticleBox,
        Shape::Square,
        Shape::Rhombus,
        Shape::Triangle,
        Shape::Rectangle,
    ];

    /// The four single-particle billiards (everything except the
    /// two-particle box).
    pub const BILLIARDS: [Shape; 4] = [
        Shape::Square,
        Shape::Rhombus,
        Shape::Triangle,
        Shape::Rectangle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Shape::TwoParticleBox => "two-particle-box",
            Shape::Square => "square",
            Shape::Rhombus => "rhombus",
            Shape::Triangle => "triangle",
            Shape::Rectangle => "rectangle",
        }
    }
}

/// A shape bound to its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeDomain {
    pub kind: Shape,
    pub spec: BoxSpec,
}

impl ShapeDomain {
    pub fn new(kind: Shape, spec: BoxSpec) -> Self {
        ShapeDomain { kind, spec }
    }

    pub fn polygon(&self) -> Polygon {
        let d = self.spec.d;
        let s2d = std::f64::consts::SQRT_2 * d;
        let verts = match self.kind {
            Shape::TwoParticleBox => vec![
                Point2::new(0.0, 0.0),
                Point2::new(d, 0.0),
                Point2::new(d, d),
                Point2::new(0.0, d),
            ],
            Shape::Square => vec![
                Point2::new(-d, -d),
                Point2::new(d, -d),
                Point2::new(d, d),
                Point2::new(-d, d),
            ],
            Shape::Rhombus => vec![
                Point2::new(s2d, 0.0),
                Point2::new(0.0, s2d),
                Point2::new(-s2d, 0.0),
                Point2::new(0.0, -s2d),
            ],
            Shape::Triangle => vec![
                Point2::new(0.0, -s2d),
                Point2::new(s2d, 0.0),
                Point2::new(0.0, s2d),
            ],
            Shape::Rectangle => {
                let (wa, wb) = (d * self.spec.a.sqrt(), d * self.spec.b.sqrt());
                vec![
                    Point2::new(-wa, -wb),
                    Point2::new(wa, -wb),
                    Point2::new(wa, wb),
                    Point2::new(-wa, wb),
                ]
            }
        };
        Polygon::new(verts)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> Region {
        self.polygon().contains(p, tol)
    }

    /// Quadrature rule over the shape. Rectangular domains get plain tensor
    /// rules; the rhombus is integrated in rotated coordinates
    /// u = x1 + x2, v = x1 - x2 (Jacobian 1/2); the triangle gets affine
    /// inner limits. All maps keep smooth integrands smooth.
    pub fn quad_rule(&self, gl: &GaussLegendre) -> Vec<WeightedNode> {
        let d = self.spec.d;
        let s2d = std::f64::consts::SQRT_2 * d;
        match self.kind {
            Shape::TwoParticleBox => rect_rule(gl, 0.0, d, 0.0, d),
            Shape::Square => rect_rule(gl, -d, d, -d, d),
            Shape::Rectangle => {
                let (wa, wb) = (d * self.spec.a.sqrt(), d * self.spec.b.sqrt());
                rect_rule(gl, -wa, wa, -wb, wb)
            }
            Shape::Rhombus => rect_rule(gl, -s2d, s2d, -s2d, s2d)
                .into_iter()
                .map(|((u, v), w)| ((0.5 * (u + v), 0.5 * (u - v)), 0.5 * w))
                .collect(),
            Shape::Triangle => {
                sheared_rule(gl, 0.0, s2d, move |x1| x1 - s2d, move |x1| s2d - x1, true)
            }
        }
    }
}
