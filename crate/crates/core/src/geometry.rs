//! Virtual-stylus head-to-pointer mapping.
//!
//! The screen is modelled as the plane `z = 0` with the user's head in front
//! of it (`z > 0`) looking along `-z`. Every frame the tracked head transform
//! moves the head centre and rotates the stylus direction; the stylus ray is
//! intersected with the screen plane, the hit point is mapped to normalised
//! device coordinates (NDC, the unit square) and finally to screen points.
//!
//! NDC `(0, 0)` is the top-left screen corner, so screen `y` grows downward
//! while world `y` grows upward.

use nalgebra::{Matrix3, Matrix4, Rotation3, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the homogeneous bottom row of a pose matrix.
pub const AFFINE_TOLERANCE: f64 = 1e-9;
/// Tolerance on orthonormality and determinant of the rotation block.
pub const ROTATION_TOLERANCE: f64 = 1e-6;
/// Rays whose `|d.z|` is at or below this never reach the screen plane.
pub const PARALLEL_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoseError {
    #[error("pose matrix contains a non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("pose matrix is not affine: bottom row is {0:?}")]
    NotAffine([f64; 4]),
    #[error("pose rotation block is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("pose rotation block has determinant {0}, expected +1")]
    Reflection(f64),
    #[error("pose timestamp {0} is not finite")]
    BadTimestamp(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("screen dimensions must be positive (got {width} x {height})")]
    BadScreen { width: f64, height: f64 },
    #[error("physical screen extent must be positive (got {x} x {y} m)")]
    BadExtent { x: f64, y: f64 },
    #[error("smoothing factor must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("target ({x}, {y}) is not reachable from head position {head:?}")]
    Unreachable { x: f64, y: f64, head: [f64; 3] },
    #[error(transparent)]
    Pose(#[from] PoseError),
}

/// Tracked head transform at one instant.
///
/// Construction validates the matrix, so every `Pose` in circulation is an
/// affine rigid transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    t_ms: f64,
    world: Matrix4<f64>,
}

impl Pose {
    /// Builds a pose from 16 row-major matrix entries.
    pub fn from_row_major(t_ms: f64, entries: &[f64; 16]) -> Result<Self, PoseError> {
        Self::new(t_ms, Matrix4::from_row_slice(entries))
    }

    pub fn new(t_ms: f64, world: Matrix4<f64>) -> Result<Self, PoseError> {
        if !t_ms.is_finite() {
            return Err(PoseError::BadTimestamp(t_ms));
        }
        validate_world(&world)?;
        Ok(Self { t_ms, world })
    }

    /// Pose with the given rotation and translation (meters).
    pub fn from_parts(t_ms: f64, rotation: Rotation3<f64>, translation: Vector3<f64>) -> Result<Self, PoseError> {
        let mut world = rotation.to_homogeneous();
        world.fixed_view_mut::<3, 1>(0, 3).copy_from(&translation);
        Self::new(t_ms, world)
    }

    pub fn identity(t_ms: f64) -> Self {
        Self { t_ms, world: Matrix4::identity() }
    }

    pub fn t_ms(&self) -> f64 {
        self.t_ms
    }

    pub fn with_time(mut self, t_ms: f64) -> Self {
        self.t_ms = t_ms;
        self
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.world
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.world.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.world.fixed_view::<3, 1>(0, 3).into_owned()
    }

    pub fn to_row_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[r * 4 + c] = self.world[(r, c)];
            }
        }
        out
    }
}

fn validate_world(world: &Matrix4<f64>) -> Result<(), PoseError> {
    for (i, v) in world.transpose().iter().enumerate() {
        if !v.is_finite() {
            return Err(PoseError::NonFinite(i));
        }
    }
    let bottom = [world[(3, 0)], world[(3, 1)], world[(3, 2)], world[(3, 3)]];
    let expected = [0.0, 0.0, 0.0, 1.0];
    if bottom.iter().zip(expected).any(|(a, b)| (a - b).abs() > AFFINE_TOLERANCE) {
        return Err(PoseError::NotAffine(bottom));
    }
    let rot = world.fixed_view::<3, 3>(0, 0).into_owned();
    let deviation = (rot.transpose() * rot - Matrix3::identity()).amax();
    if deviation > ROTATION_TOLERANCE {
        return Err(PoseError::NotOrthonormal(deviation));
    }
    let det = rot.determinant();
    if (det - 1.0).abs() > ROTATION_TOLERANCE {
        return Err(PoseError::Reflection(det));
    }
    Ok(())
}

/// Head centre and stylus direction in the head's object space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadModel {
    /// Homogeneous head centre; the last component is 1.
    pub origin: Vector4<f64>,
    /// Stylus direction before any rotation.
    pub stylus: Vector3<f64>,
}

impl HeadModel {
    pub fn with_origin(x: f64, y: f64, z: f64) -> Self {
        Self { origin: Vector4::new(x, y, z, 1.0), ..Self::default() }
    }
}

impl Default for HeadModel {
    /// Head centre at the anchor origin, stylus along `-z`.
    fn default() -> Self {
        Self { origin: Vector4::new(0.0, 0.0, 0.0, 1.0), stylus: Vector3::new(0.0, 0.0, -1.0) }
    }
}

/// Which screen corner NDC `(0, 0)` maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NdcOrigin {
    #[default]
    TopLeft,
}

/// Logical and physical description of the screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenGeometry {
    pub width_pt: f64,
    pub height_pt: f64,
    #[serde(default)]
    pub plane_z: f64,
    #[serde(default)]
    pub ndc_origin: NdcOrigin,
    /// Physical width of the plane region mapped onto NDC `[0, 1]` (meters).
    pub meters_per_ndc_x: f64,
    /// Physical height of the plane region mapped onto NDC `[0, 1]` (meters).
    pub meters_per_ndc_y: f64,
}

impl ScreenGeometry {
    pub const DEFAULT_WIDTH_PT: f64 = 375.0;
    pub const DEFAULT_HEIGHT_PT: f64 = 812.0;
    pub const DEFAULT_METERS_PER_NDC_X: f64 = 0.3;

    /// Screen of the given size whose physical extent keeps the default
    /// horizontal gain and a square-pixel vertical gain.
    pub fn new(width_pt: f64, height_pt: f64) -> Result<Self, GeometryError> {
        let mx = Self::DEFAULT_METERS_PER_NDC_X;
        Self::with_extent(width_pt, height_pt, mx, mx * height_pt / width_pt)
    }

    pub fn with_extent(
        width_pt: f64,
        height_pt: f64,
        meters_per_ndc_x: f64,
        meters_per_ndc_y: f64,
    ) -> Result<Self, GeometryError> {
        let screen = Self {
            width_pt,
            height_pt,
            plane_z: 0.0,
            ndc_origin: NdcOrigin::TopLeft,
            meters_per_ndc_x,
            meters_per_ndc_y,
        };
        screen.validate()?;
        Ok(screen)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.width_pt > 0.0 && self.height_pt > 0.0) || !self.width_pt.is_finite() || !self.height_pt.is_finite() {
            return Err(GeometryError::BadScreen { width: self.width_pt, height: self.height_pt });
        }
        if !(self.meters_per_ndc_x > 0.0 && self.meters_per_ndc_y > 0.0)
            || !self.meters_per_ndc_x.is_finite()
            || !self.meters_per_ndc_y.is_finite()
        {
            return Err(GeometryError::BadExtent { x: self.meters_per_ndc_x, y: self.meters_per_ndc_y });
        }
        Ok(())
    }

    pub fn center(&self) -> ScreenPoint {
        ScreenPoint::new(self.width_pt / 2.0, self.height_pt / 2.0, true)
    }

    /// Plane point `(b.x, b.y)` in meters to NDC, unclamped.
    pub fn plane_to_ndc(&self, bx: f64, by: f64) -> [f64; 2] {
        match self.ndc_origin {
            NdcOrigin::TopLeft => [0.5 + bx / self.meters_per_ndc_x, 0.5 - by / self.meters_per_ndc_y],
        }
    }

    pub fn ndc_to_plane(&self, ndc: [f64; 2]) -> [f64; 2] {
        match self.ndc_origin {
            NdcOrigin::TopLeft => [(ndc[0] - 0.5) * self.meters_per_ndc_x, (0.5 - ndc[1]) * self.meters_per_ndc_y],
        }
    }
}

impl Default for ScreenGeometry {
    fn default() -> Self {
        Self::new(Self::DEFAULT_WIDTH_PT, Self::DEFAULT_HEIGHT_PT).expect("default screen is valid")
    }
}

/// Cursor position in screen points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenPoint {
    pub x: f64,
    pub y: f64,
    /// False when the stylus hit the plane outside the screen and the point
    /// was clamped onto the border.
    pub in_bounds: bool,
}

impl ScreenPoint {
    pub fn new(x: f64, y: f64, in_bounds: bool) -> Self {
        Self { x, y, in_bounds }
    }

    pub fn distance(&self, other: &ScreenPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Exponential moving average over cursor positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingFilter {
    alpha: f64,
    state: Option<ScreenPoint>,
}

impl SmoothingFilter {
    pub fn new(alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(GeometryError::BadAlpha(alpha));
        }
        Ok(Self { alpha, state: None })
    }

    /// Filter with `alpha = 1`: output equals input.
    pub fn passthrough() -> Self {
        Self { alpha: 1.0, state: None }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn last(&self) -> Option<ScreenPoint> {
        self.state
    }

    pub fn reset(&mut self) {
        self.state = None;
    }

    pub fn smooth(&mut self, point: ScreenPoint) -> ScreenPoint {
        let out = match self.state {
            Some(prev) if self.alpha < 1.0 => {
                let a = self.alpha;
                ScreenPoint::new(a * point.x + (1.0 - a) * prev.x, a * point.y + (1.0 - a) * prev.y, point.in_bounds)
            }
            _ => point,
        };
        self.state = Some(out);
        out
    }
}

impl Default for SmoothingFilter {
    fn default() -> Self {
        Self::passthrough()
    }
}

/// Stylus ray in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vector3<f64>,
    pub direction: Vector3<f64>,
}

/// The stylus ray cannot reach the screen plane; callers hold the last cursor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("stylus ray does not intersect the screen plane")]
pub struct NoIntersection;

/// Moves the head centre by the full affine pose and rotates the stylus by
/// the linear block only.
pub fn update_ray(head: &HeadModel, pose: &Pose) -> Ray {
    let p = pose.matrix() * head.origin;
    let d = pose.rotation() * head.stylus;
    Ray { origin: Vector3::new(p.x, p.y, p.z), direction: d }
}

/// Intersects a ray with the plane `z = plane_z`, returning `(b.x, b.y)` in meters.
pub fn intersect_plane(ray: &Ray, plane_z: f64) -> Result<[f64; 2], NoIntersection> {
    let dz = ray.direction.z;
    if dz.abs() <= PARALLEL_EPSILON {
        return Err(NoIntersection);
    }
    let t = (plane_z - ray.origin.z) / dz;
    if t < 0.0 {
        return Err(NoIntersection);
    }
    Ok([ray.origin.x + ray.direction.x * t, ray.origin.y + ray.direction.y * t])
}

/// Ray-plane intersection mapped to NDC. Values outside `[0, 1]` are kept.
pub fn intersect_screen(ray: &Ray, screen: &ScreenGeometry) -> Result<[f64; 2], NoIntersection> {
    let [bx, by] = intersect_plane(ray, screen.plane_z)?;
    Ok(screen.plane_to_ndc(bx, by))
}

pub fn ndc_to_screen(ndc: [f64; 2], screen: &ScreenGeometry) -> ScreenPoint {
    let inside = (0.0..=1.0).contains(&ndc[0]) && (0.0..=1.0).contains(&ndc[1]);
    ScreenPoint::new(ndc[0].clamp(0.0, 1.0) * screen.width_pt, ndc[1].clamp(0.0, 1.0) * screen.height_pt, inside)
}

/// Full pose-to-cursor mapping for one frame.
///
/// When the stylus misses the plane the previous smoothed cursor is held
/// (screen centre before any history).
pub fn pointer_from_pose(
    head: &HeadModel,
    pose: &Pose,
    screen: &ScreenGeometry,
    filter: &mut SmoothingFilter,
) -> ScreenPoint {
    let ray = update_ray(head, pose);
    match intersect_screen(&ray, screen) {
        Ok(ndc) => filter.smooth(ndc_to_screen(ndc, screen)),
        Err(NoIntersection) => filter.last().unwrap_or_else(|| screen.center()),
    }
}

/// Inverse mapping: a pose with the head at `head_position` whose stylus
/// lands on `target`. The rotation is a yaw about `y` followed by a pitch
/// about `x`, with no roll.
///
/// Assumes the default [`HeadModel`] (head centre at the anchor origin,
/// stylus along `-z`). The returned pose has timestamp 0.
pub fn pose_for_screen_point(
    target: &ScreenPoint,
    head_position: Vector3<f64>,
    screen: &ScreenGeometry,
) -> Result<Pose, GeometryError> {
    let unreachable = || GeometryError::Unreachable {
        x: target.x,
        y: target.y,
        head: [head_position.x, head_position.y, head_position.z],
    };
    if head_position.z.is_nan() || head_position.z <= screen.plane_z || !target.x.is_finite() || !target.y.is_finite() {
        return Err(unreachable());
    }
    let [bx, by] = screen.ndc_to_plane([target.x / screen.width_pt, target.y / screen.height_pt]);
    let dir = Vector3::new(bx, by, screen.plane_z) - head_position;
    let len = dir.norm();
    if len.is_nan() || len <= 0.0 {
        return Err(unreachable());
    }
    let d = dir / len;
    let pitch = d.y.clamp(-1.0, 1.0).asin();
    let yaw = (-d.x).atan2(-d.z);
    let rotation =
        Rotation3::from_axis_angle(&Vector3::y_axis(), yaw) * Rotation3::from_axis_angle(&Vector3::x_axis(), pitch);
    Ok(Pose::from_parts(0.0, rotation, head_position)?)
}

/// Stateful per-session mapper bundling head model, screen and filter.
#[derive(Debug, Clone)]
pub struct PointerMapper {
    pub head: HeadModel,
    pub screen: ScreenGeometry,
    filter: SmoothingFilter,
}

impl PointerMapper {
    pub fn new(head: HeadModel, screen: ScreenGeometry, filter: SmoothingFilter) -> Self {
        Self { head, screen, filter }
    }

    pub fn map(&mut self, pose: &Pose) -> ScreenPoint {
        pointer_from_pose(&self.head, pose, &self.screen, &mut self.filter)
    }

    pub fn reset(&mut self) {
        self.filter.reset();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn yaw_pose(deg: f64, z: f64) -> Pose {
        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), deg.to_radians());
        Pose::from_parts(0.0, rot, Vector3::new(0.0, 0.0, z)).unwrap()
    }

    #[test]
    fn update_ray_identity() {
        let head = HeadModel::with_origin(0.0, 0.0, 0.5);
        let ray = update_ray(&head, &Pose::identity(0.0));
        assert_eq!(ray.origin, Vector3::new(0.0, 0.0, 0.5));
        assert_eq!(ray.direction, Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn update_ray_translation_keeps_direction() {
        let head = HeadModel::with_origin(0.0, 0.0, 0.5);
        let pose = Pose::from_parts(0.0, Rotation3::identity(), Vector3::new(0.1, 0.2, 0.0)).unwrap();
        let ray = update_ray(&head, &pose);
        assert_relative_eq!(ray.origin, Vector3::new(0.1, 0.2, 0.5), epsilon = 1e-15);
        assert_eq!(ray.direction, Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn update_ray_yaw_ten_degrees() {
        // Independent trig values for 10 degrees.
        let (s, c) = (0.17364817766693033, 0.984807753012208);
        let head = HeadModel::with_origin(0.0, 0.0, 0.5);
        let pose = yaw_pose(10.0, 0.0);
        let ray = update_ray(&head, &pose);
        assert_relative_eq!(ray.direction, Vector3::new(-s, 0.0, -c), epsilon = 1e-12);
        assert_relative_eq!(ray.origin, Vector3::new(0.5 * s, 0.0, 0.5 * c), epsilon = 1e-12);
    }

    #[test]
    fn intersect_straight_ahead_and_offset() {
        let ray = Ray { origin: Vector3::new(0.1, 0.2, 0.5), direction: Vector3::new(0.0, 0.0, -1.0) };
        assert_eq!(intersect_plane(&ray, 0.0).unwrap(), [0.1, 0.2]);
        let ray = Ray { origin: Vector3::new(0.0, 0.0, 1.0), direction: Vector3::new(0.2, 0.0, -1.0) };
        assert_eq!(intersect_plane(&ray, 0.0).unwrap(), [0.2, 0.0]);
    }

    #[test]
    fn intersect_rejects_rays_away_or_parallel() {
        let away = Ray { origin: Vector3::new(0.0, 0.0, 0.5), direction: Vector3::new(0.0, 0.0, 1.0) };
        assert_eq!(intersect_plane(&away, 0.0), Err(NoIntersection));
        let parallel = Ray { origin: Vector3::new(0.0, 0.0, 0.5), direction: Vector3::new(1.0, 0.0, 1e-10) };
        assert_eq!(intersect_plane(&parallel, 0.0), Err(NoIntersection));
    }

    #[test]
    fn intersect_yaw_ten_degrees_at_half_meter() {
        let head = HeadModel::default();
        let ray = update_ray(&head, &yaw_pose(10.0, 0.5));
        let [bx, _] = intersect_plane(&ray, 0.0).unwrap();
        // -0.5 * tan(10 deg)
        assert_relative_eq!(bx, -0.08816349035423248, max_relative = 1e-12);
    }

    #[test]
    fn ndc_to_screen_examples() {
        let screen = ScreenGeometry::default();
        assert_eq!(ndc_to_screen([0.5, 0.5], &screen), ScreenPoint::new(187.5, 406.0, true));
        assert_eq!(ndc_to_screen([0.0, 0.0], &screen), ScreenPoint::new(0.0, 0.0, true));
        assert_eq!(ndc_to_screen([1.2, 0.5], &screen), ScreenPoint::new(375.0, 406.0, false));
    }

    #[test]
    fn pointer_straight_ahead_hits_center() {
        let head = HeadModel::with_origin(0.0, 0.0, 0.5);
        let mut filter = SmoothingFilter::passthrough();
        let screen = ScreenGeometry::default();
        let a = pointer_from_pose(&head, &Pose::identity(0.0), &screen, &mut filter);
        let b = pointer_from_pose(&head, &Pose::identity(16.0), &screen, &mut filter);
        assert_eq!(a, ScreenPoint::new(187.5, 406.0, true));
        assert_eq!(a, b);
    }

    #[test]
    fn pointer_yaw_ten_degrees() {
        let screen = ScreenGeometry::default();
        let mut filter = SmoothingFilter::passthrough();
        let p = pointer_from_pose(&HeadModel::default(), &yaw_pose(10.0, 0.5), &screen, &mut filter);
        // NDC x = 0.5 - 0.5 tan(10 deg) / 0.3
        let expected = (0.5 - 0.08816349035423248 / 0.3) * 375.0;
        assert_relative_eq!(p.x, expected, max_relative = 1e-12);
        assert!((p.x - 77.30).abs() < 5e-3);
        assert_relative_eq!(p.y, 406.0, epsilon = 1e-9);
    }

    #[test]
    fn pointer_holds_on_tracking_loss() {
        let screen = ScreenGeometry::default();
        let mut filter = SmoothingFilter::passthrough();
        let head = HeadModel::default();
        let backwards = Pose::from_parts(
            0.0,
            Rotation3::from_axis_angle(&Vector3::y_axis(), std::f64::consts::PI),
            Vector3::new(0.0, 0.0, 0.5),
        )
        .unwrap();
        assert_eq!(pointer_from_pose(&head, &backwards, &screen, &mut filter), screen.center());
        let seen = pointer_from_pose(&head, &yaw_pose(5.0, 0.5), &screen, &mut filter);
        assert_eq!(pointer_from_pose(&head, &backwards, &screen, &mut filter), seen);
    }

    #[test]
    fn inverse_of_center_is_identity_rotation() {
        let screen = ScreenGeometry::default();
        let pose = pose_for_screen_point(&screen.center(), Vector3::new(0.0, 0.0, 0.4), &screen).unwrap();
        assert_relative_eq!(pose.rotation(), Matrix3::identity(), epsilon = 1e-15);
    }

    #[test]
    fn inverse_recovers_ten_degree_yaw() {
        let screen = ScreenGeometry::default();
        let x = (0.5 - 0.5 * 10f64.to_radians().tan() / 0.3) * 375.0;
        let pose =
            pose_for_screen_point(&ScreenPoint::new(x, 406.0, true), Vector3::new(0.0, 0.0, 0.5), &screen).unwrap();
        let rot = pose.rotation();
        let yaw = rot[(0, 2)].atan2(rot[(2, 2)]).to_degrees();
        assert!((yaw - 10.0).abs() < 1e-6, "yaw {yaw}");
    }

    #[test]
    fn inverse_rejects_head_behind_screen() {
        let screen = ScreenGeometry::default();
        assert!(pose_for_screen_point(&screen.center(), Vector3::new(0.0, 0.0, -0.1), &screen).is_err());
    }

    #[test]
    fn smoothing_examples() {
        let mut f = SmoothingFilter::passthrough();
        let p = ScreenPoint::new(3.25, -1.0, true);
        assert_eq!(f.smooth(p), p);

        let mut f = SmoothingFilter::new(0.5).unwrap();
        f.smooth(ScreenPoint::new(0.0, 0.0, true));
        let target = ScreenPoint::new(10.0, 10.0, true);
        assert_eq!(f.smooth(target), ScreenPoint::new(5.0, 5.0, true));
        assert_eq!(f.smooth(target), ScreenPoint::new(7.5, 7.5, true));
        assert_eq!(f.smooth(target), ScreenPoint::new(8.75, 8.75, true));
    }

    #[test]
    fn smoothing_rejects_bad_alpha() {
        assert!(SmoothingFilter::new(0.0).is_err());
        assert!(SmoothingFilter::new(1.5).is_err());
    }

    #[test]
    fn pose_validation() {
        let mut m = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        assert!(Pose::from_row_major(0.0, &m).is_ok());
        m[0] = 2.0;
        assert!(matches!(Pose::from_row_major(0.0, &m), Err(PoseError::NotOrthonormal(_))));
        m[0] = -1.0;
        assert!(matches!(Pose::from_row_major(0.0, &m), Err(PoseError::Reflection(_))));
        m[0] = 1.0;
        m[13] = 0.5;
        assert!(matches!(Pose::from_row_major(0.0, &m), Err(PoseError::NotAffine(_))));
        m[13] = 0.0;
        m[3] = f64::NAN;
        assert!(matches!(Pose::from_row_major(0.0, &m), Err(PoseError::NonFinite(3))));
    }

    #[test]
    fn row_major_round_trip() {
        let pose = yaw_pose(12.5, 0.43);
        let again = Pose::from_row_major(0.0, &pose.to_row_major()).unwrap();
        assert_eq!(pose, again);
        assert_eq!(pose.to_row_major()[3], 0.0);
        assert_eq!(pose.to_row_major()[11], 0.43);
    }
}
