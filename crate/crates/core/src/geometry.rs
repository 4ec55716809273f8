//! Planar geometry, path loss and the point processes used for base stations
//! and RIS clusters.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn from_polar(center: Point2D, radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point2D::new(center.x + radius * c, center.y + radius * s)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Path-loss exponents and intercept of the model `g(d) = beta * (d + 1)^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossParams {
    /// Exponent of the line-of-sight legs (BS to RIS, serving RIS to UE).
    pub alpha_los: f64,
    /// Exponent of the direct BS to UE links.
    pub alpha_nlos: f64,
    /// Exponent of the RIS to UE leg of reflected interference.
    pub alpha_ir: f64,
    pub beta: f64,
    /// Carrier frequency in Hz, kept for reporting.
    pub f_c: f64,
}

impl PathlossParams {
    /// Free-space intercept at carrier `f_c` with the given exponents.
    pub fn from_carrier(f_c: f64, alpha_los: f64, alpha_nlos: f64, alpha_ir: f64) -> Result<Self> {
        let p = PathlossParams {
            alpha_los,
            alpha_nlos,
            alpha_ir,
            beta: free_space_beta(f_c),
            f_c,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [
            ("alpha_los", self.alpha_los),
            ("alpha_nlos", self.alpha_nlos),
            ("alpha_ir", self.alpha_ir),
        ] {
            if !(a > 2.0 && a.is_finite()) {
                return Err(Error::domain("path-loss exponent", alloc::format!("{name} = {a} must exceed 2")));
            }
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::domain("path-loss intercept", alloc::format!("beta = {}", self.beta)));
        }
        Ok(())
    }
}

impl Default for PathlossParams {
    fn default() -> Self {
        PathlossParams {
            alpha_los: 3.0,
            alpha_nlos: 4.0,
            alpha_ir: 4.0,
            beta: free_space_beta(2.4e9),
            f_c: 2.4e9,
        }
    }
}

/// `(c / (4 pi f_c))^2`, the free-space power gain at one metre.
pub fn free_space_beta(f_c: f64) -> f64 {
    let a = SPEED_OF_LIGHT / (4.0 * PI * f_c);
    a * a
}

/// `(d + 1)^-alpha`, with a fast path for integer exponents.
#[inline]
pub(crate) fn unit_gain(d: f64, alpha: f64) -> f64 {
    let b = d + 1.0;
    if alpha == 4.0 {
        let b2 = b * b;
        1.0 / (b2 * b2)
    } else if alpha == 3.0 {
        1.0 / (b * b * b)
    } else if alpha.fract() == 0.0 && alpha.abs() < 64.0 {
        b.powi(-(alpha as i32))
    } else {
        b.powf(-alpha)
    }
}

/// Path gain `beta * (d + 1)^-alpha`.
pub fn pathloss_g(d: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain("distance", alloc::format!("{d}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain("path-loss exponent", alloc::format!("{alpha}")));
    }
    if !(beta > 0.0) {
        return Err(Error::domain("path-loss intercept", alloc::format!("{beta}")));
    }
    Ok(beta * unit_gain(d, alpha))
}

/// Reflected path gain seen from the base station: the RIS sits at distance `y`
/// from the BS at angle `psi` off the BS to UE direction, and the UE at distance `x`.
/// The first leg uses `alpha1`, the RIS to UE leg `alpha2`.
pub fn pathloss_scalar_g(x: f64, y: f64, psi: f64, alpha1: f64, alpha2: f64, beta: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::domain("distance", alloc::format!("x = {x}, y = {y}")));
    }
    Ok(beta * beta * bs_centric_unit_gain(x, y, psi.cos(), alpha1, alpha2))
}

/// `(y+1)^-alpha1 * (d2+1)^-alpha2` with `d2` the law-of-cosines distance.
#[inline]
pub(crate) fn bs_centric_unit_gain(x: f64, y: f64, cos_psi: f64, alpha1: f64, alpha2: f64) -> f64 {
    let d2 = (x * x + y * y - 2.0 * x * y * cos_psi).max(0.0).sqrt();
    unit_gain(y, alpha1) * unit_gain(d2, alpha2)
}

/// Reflected path gain for explicit positions: `g(|bs - ris|) g(|ris - ue|)`.
pub fn reflected_path_gain_ue_centric(bs: Point2D, ris: Point2D, ue: Point2D, alpha1: f64, alpha2: f64, beta: f64) -> f64 {
    beta * beta * unit_gain(bs.distance(ris), alpha1) * unit_gain(ris.distance(ue), alpha2)
}

/// A planar sector of an annulus: radii in `[r_in, r_out]`, angles within
/// `half_angle` of `orientation`. A half angle of `pi` gives the full annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub center: Point2D,
    pub r_in: f64,
    pub r_out: f64,
    pub orientation: f64,
    pub half_angle: f64,
}

pub type AnnulusSupport = Support;
pub type WedgeSupport = Support;

impl Support {
    pub fn annulus(center: Point2D, r_in: f64, r_out: f64) -> Result<Self> {
        Self::wedge(center, r_in, r_out, 0.0, PI)
    }

    pub fn wedge(center: Point2D, r_in: f64, r_out: f64, orientation: f64, half_angle: f64) -> Result<Self> {
        if !(r_in >= 0.0 && r_out > r_in && r_out.is_finite()) {
            return Err(Error::domain("support radii", alloc::format!("r_in = {r_in}, r_out = {r_out}")));
        }
        if !(half_angle > 0.0 && half_angle <= PI) {
            return Err(Error::domain("wedge half angle", alloc::format!("{half_angle}")));
        }
        Ok(Support {
            center,
            r_in,
            r_out,
            orientation,
            half_angle,
        })
    }

    pub fn is_full_annulus(&self) -> bool {
        self.half_angle >= PI
    }

    pub fn area(&self) -> f64 {
        self.half_angle * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    pub fn contains(&self, p: Point2D) -> bool {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let rho = dx.hypot(dy);
        if rho < self.r_in || rho > self.r_out {
            return false;
        }
        if self.is_full_annulus() {
            return true;
        }
        let mut d = dy.atan2(dx) - self.orientation;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        d.abs() <= self.half_angle + 1e-12
    }

    /// Uniform point in the support.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        let lo = self.r_in * self.r_in;
        let hi = self.r_out * self.r_out;
        let rho = (lo + rng.random::<f64>() * (hi - lo)).sqrt();
        let theta = self.orientation + self.half_angle * (2.0 * rng.random::<f64>() - 1.0);
        Point2D::from_polar(self.center, rho, theta)
    }
}

pub(crate) fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(p) => {
            let k: f64 = p.sample(rng);
            k as usize
        }
        Err(_) => 0,
    }
}

/// Homogeneous PPP of base stations on the annulus `r..r_max` around the origin.
pub fn sample_bs_field<R: Rng + ?Sized>(lambda_bs: f64, r: f64, r_max: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    Ok(sample_ppp(lambda_bs, &Support::annulus(Point2D::ORIGIN, r, r_max)?, rng))
}

/// Daughter points of one Matérn cluster.
pub fn sample_mcp_cluster<R: Rng + ?Sized>(support: &Support, lambda_ris: f64, rng: &mut R) -> Vec<Point2D> {
    sample_ppp(lambda_ris, support, rng)
}

/// `n_ris` RISs placed uniformly on a wedge.
pub fn sample_bpp_wedge<R: Rng + ?Sized>(n_ris: usize, support: &Support, rng: &mut R) -> Vec<Point2D> {
    sample_bpp(n_ris, support, rng)
}

/// Points of a homogeneous PPP of intensity `lambda` (per square metre) on the support.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, support: &Support, rng: &mut R) -> Vec<Point2D> {
    let n = sample_poisson(lambda * support.area(), rng);
    (0..n).map(|_| support.sample_point(rng)).collect()
}

/// Exactly `n` independent uniform points on the support.
pub fn sample_bpp<R: Rng + ?Sized>(n: usize, support: &Support, rng: &mut R) -> Vec<Point2D> {
    (0..n).map(|_| support.sample_point(rng)).collect()
}

/// One realisation of the network seen by a UE at the origin: the serving BS at
/// `(r, 0)`, the interfering BSs on the annulus `r..r_max`, and one RIS cluster
/// per BS on the annulus `R_in..R_out` around it.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSample {
    pub serving_bs: Point2D,
    pub serving_cluster: Vec<Point2D>,
    pub interferers: Vec<Point2D>,
    pub clusters: Vec<Vec<Point2D>>,
}

impl NetworkSample {
    pub fn ue(&self) -> Point2D {
        Point2D::ORIGIN
    }
}

/// Samples a full network layout. Clusters are attached to every interferer.
pub fn sample_network<R: Rng + ?Sized>(
    lambda_bs: f64,
    lambda_ris: f64,
    serving_distance: f64,
    r_max: f64,
    r_in: f64,
    r_out: f64,
    rng: &mut R,
) -> Result<NetworkSample> {
    if !(serving_distance > 0.0 && r_max > serving_distance) {
        return Err(Error::domain(
            "simulation window",
            alloc::format!("r = {serving_distance}, r_max = {r_max}"),
        ));
    }
    let field = Support::annulus(Point2D::ORIGIN, serving_distance, r_max)?;
    let serving_bs = Point2D::new(serving_distance, 0.0);
    let cluster_of = |c: Point2D, rng: &mut R| -> Result<Vec<Point2D>> {
        Ok(sample_ppp(lambda_ris, &Support::annulus(c, r_in, r_out)?, rng))
    };
    let serving_cluster = cluster_of(serving_bs, rng)?;
    let interferers = sample_ppp(lambda_bs, &field, rng);
    let mut clusters = Vec::with_capacity(interferers.len());
    for &bs in &interferers {
        clusters.push(cluster_of(bs, rng)?);
    }
    Ok(NetworkSample {
        serving_bs,
        serving_cluster,
        interferers,
        clusters,
    })
}
