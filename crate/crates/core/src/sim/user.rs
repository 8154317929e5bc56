use rand::Rng;

use crate::real::Real;

/// Largest heading change per step (rad).
const HEADING_JITTER: f64 = std::f64::consts::PI / 8.0;

/// A pedestrian user inside the serving disc of the BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserState<T> {
    /// `(x, y, z)` in metres; the BS footprint is the origin.
    pub position: [T; 3],
    /// m/s
    pub speed: T,
    /// Azimuth of travel (rad).
    pub heading: T,
}

impl<T: Real> UserState<T> {
    /// Uniform position in the disc of `radius`, uniform heading.
    pub fn random_start<R: Rng + ?Sized>(radius: T, height: T, speed: T, rng: &mut R) -> Self {
        let r = radius * T::lit(rng.random::<f64>().sqrt());
        let phi = T::lit(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
        let heading = T::lit(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
        Self { position: [r * phi.cos(), r * phi.sin(), height], speed, heading }
    }

    pub fn horizontal_distance(&self) -> T {
        self.position[0].hypot(self.position[1])
    }
}

/// One step of the random-direction walk: jitter the heading, advance by
/// `speed * dt` and fold back into the disc at its boundary, mirroring the
/// heading about the local tangent.
pub fn step_user<T: Real, R: Rng + ?Sized>(state: &UserState<T>, dt: T, radius: T, rng: &mut R) -> UserState<T> {
    debug_assert!(dt > T::zero());
    let jitter = T::lit(rng.random_range(-HEADING_JITTER..=HEADING_JITTER));
    let mut heading = state.heading + jitter;
    let step = state.speed * dt;
    let [x0, y0, z] = state.position;
    let (mut x, mut y) = (x0 + step * heading.cos(), y0 + step * heading.sin());
    let r = x.hypot(y);
    if r > radius {
        let folded = (radius + radius - r).max(T::zero()).min(radius);
        let (nx, ny) = (x / r, y / r);
        x = nx * folded;
        y = ny * folded;
        let (vx, vy) = (heading.cos(), heading.sin());
        let along = vx * nx + vy * ny;
        heading = (vy - T::lit(2.0) * along * ny).atan2(vx - T::lit(2.0) * along * nx);
    }
    UserState { position: [x, y, z], speed: state.speed, heading }
}
