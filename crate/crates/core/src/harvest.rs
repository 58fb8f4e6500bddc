//! Harvest workflow: staging, attaching, grasping, detaching.
//!
//! The workflow is an explicit state machine ([`step`]). [`simulate_harvest`]
//! drives it for one fruit, checking the grasp and detach gates, and
//! [`run_campaign`] replays a set of recorded grasp trials.
//!
//! Time advances only at phase boundaries. Staging, attaching and grasping take
//! configured latencies; detaching lasts as long as the wrist needs to turn
//! through the required rotation.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::datasets::{self, GraspTrial, SizeGroup};
use crate::error::{Error, Result};
use crate::mechanism::{alpha_for_aperture, total_grasp_moment, GripperGeometry};
use crate::model::{cylinder_from_fruit, CylinderFruit, Viewpoint};
use crate::sizing::{detach_budget, detach_time, MotorSpec};

/// Why a run ended in [`HarvestState::Fault`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultReason {
    /// Operator or supervisor abort.
    Operator,
    /// Fruit width is outside the achievable aperture range.
    Aperture,
    /// Grasp moment at closure is below the holding threshold.
    HoldingMoment,
    /// Required wrist rotation exceeds the wrist's travel.
    Rotation,
}

impl FaultReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultReason::Operator => "abort",
            FaultReason::Aperture => "aperture",
            FaultReason::HoldingMoment => "holding moment",
            FaultReason::Rotation => "rotation",
        }
    }
}

impl fmt::Display for FaultReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HarvestState {
    Home,
    Staging,
    Attaching,
    Grasping,
    Detaching,
    Retrieved,
    Fault(FaultReason),
}

impl fmt::Display for HarvestState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarvestState::Home => f.write_str("Home"),
            HarvestState::Staging => f.write_str("Staging"),
            HarvestState::Attaching => f.write_str("Attaching"),
            HarvestState::Grasping => f.write_str("Grasping"),
            HarvestState::Detaching => f.write_str("Detaching"),
            HarvestState::Retrieved => f.write_str("Retrieved"),
            HarvestState::Fault(reason) => write!(f, "Fault({reason})"),
        }
    }
}

impl Serialize for HarvestState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HarvestEvent {
    BeginStage,
    StagePoseReached,
    FruitEnclosed,
    ClosureReached,
    DetachConfirmed,
    Abort(FaultReason),
}

impl fmt::Display for HarvestEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarvestEvent::BeginStage => f.write_str("BeginStage"),
            HarvestEvent::StagePoseReached => f.write_str("StagePoseReached"),
            HarvestEvent::FruitEnclosed => f.write_str("FruitEnclosed"),
            HarvestEvent::ClosureReached => f.write_str("ClosureReached"),
            HarvestEvent::DetachConfirmed => f.write_str("DetachConfirmed"),
            HarvestEvent::Abort(reason) => write!(f, "Abort({reason})"),
        }
    }
}

/// Workflow transition function. `Abort` is accepted from every state.
pub fn step(state: HarvestState, event: HarvestEvent) -> Result<HarvestState> {
    use HarvestEvent as E;
    use HarvestState as S;
    match (state, event) {
        (_, E::Abort(reason)) => Ok(S::Fault(reason)),
        (S::Home, E::BeginStage) => Ok(S::Staging),
        (S::Staging, E::StagePoseReached) => Ok(S::Attaching),
        (S::Attaching, E::FruitEnclosed) => Ok(S::Grasping),
        (S::Grasping, E::ClosureReached) => Ok(S::Detaching),
        (S::Detaching, E::DetachConfirmed) => Ok(S::Retrieved),
        (state, event) => Err(Error::InvalidTransition {
            state: state.to_string(),
            event: event.to_string(),
        }),
    }
}

/// End-effector pose: position [m] and Euler-XYZ orientation [deg].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pose6D {
    pub position: [f64; 3],
    pub orientation_deg: [f64; 3],
}

impl Pose6D {
    pub fn new(position: [f64; 3], orientation_deg: [f64; 3]) -> Result<Self> {
        if position.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("position", "must be finite"));
        }
        if orientation_deg.iter().any(|&o| !(o > -180.0 && o <= 180.0)) {
            return Err(Error::domain(
                "orientation",
                "components must lie in (-180, 180]",
            ));
        }
        Ok(Self {
            position,
            orientation_deg,
        })
    }
}

/// Fixed pre-grasp pose of the end-effector frame relative to the arm base.
pub const STAGING_POSE: Pose6D = Pose6D {
    position: [-0.09, -0.53, 0.84],
    orientation_deg: [90.1, 5.4, 0.0],
};

/// Where the required wrist rotation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMode {
    /// Use each trial's recorded rotation.
    Replay,
    /// Use the nearest-group predictor built from the trial set.
    Predict,
}

/// Supplies the wrist rotation needed to detach a fruit [deg].
pub trait RotationModel {
    fn required_rotation(&self, fruit: &CylinderFruit, viewpoint: Viewpoint) -> Result<f64>;
}

/// A fixed, known rotation (replay of a recorded trial).
#[derive(Debug, Clone, Copy)]
pub struct ReplayRotation(pub f64);

impl RotationModel for ReplayRotation {
    fn required_rotation(&self, _: &CylinderFruit, _: Viewpoint) -> Result<f64> {
        Ok(self.0)
    }
}

/// Nearest size-group mean from a set of trials.
#[derive(Debug, Clone, Copy)]
pub struct NearestGroupRotation<'a>(pub &'a [GraspTrial]);

impl RotationModel for NearestGroupRotation<'_> {
    fn required_rotation(&self, fruit: &CylinderFruit, viewpoint: Viewpoint) -> Result<f64> {
        datasets::required_rotation(
            self.0,
            fruit.width() * 1000.0,
            fruit.height() * 1000.0,
            viewpoint,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarvestConfig {
    /// Pull force used for the holding threshold [N]; defaults to the CV bench mean.
    pub holding_force: f64,
    /// Angular acceleration in the detach budget [rad/s²]; 0 is quasi-static.
    pub angular_accel: f64,
    pub staging_latency_s: f64,
    pub attach_latency_s: f64,
    pub grasp_latency_s: f64,
    /// Wrist travel available for detaching [deg].
    pub max_wrist_rotation_deg: f64,
    pub rotation_mode: RotationMode,
}

impl Default for HarvestConfig {
    fn default() -> Self {
        Self {
            holding_force: 9.6,
            angular_accel: 0.0,
            staging_latency_s: 2.0,
            attach_latency_s: 1.0,
            grasp_latency_s: 1.0,
            max_wrist_rotation_deg: 360.0,
            rotation_mode: RotationMode::Replay,
        }
    }
}

impl HarvestConfig {
    fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("staging_latency_s", self.staging_latency_s),
            ("attach_latency_s", self.attach_latency_s),
            ("grasp_latency_s", self.grasp_latency_s),
            ("max_wrist_rotation_deg", self.max_wrist_rotation_deg),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoggedState {
    pub state: HarvestState,
    /// Time the state was entered [s].
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarvestOutcome {
    pub success: bool,
    pub final_state: HarvestState,
    /// Encoder angle at which the fingers close on the fruit [rad].
    pub closure_alpha: Option<f64>,
    /// Grasp moment at closure with the rated motor torque [N·m].
    pub applied_moment: Option<f64>,
    pub holding_threshold: f64,
    /// Wrist rotation performed while detaching [deg].
    pub wrist_rotation_deg: f64,
    /// Duration of the detaching phase [s].
    pub detach_time_s: f64,
    /// Time of the last logged state [s].
    pub elapsed_s: f64,
    /// States in entry order; strictly increasing in time.
    pub event_log: Vec<LoggedState>,
}

struct Run {
    state: HarvestState,
    time: f64,
    log: Vec<LoggedState>,
}

impl Run {
    fn fire(&mut self, event: HarvestEvent, after: f64) -> Result<()> {
        self.state = step(self.state, event)?;
        self.time += after;
        self.log.push(LoggedState {
            state: self.state,
            time_s: self.time,
        });
        Ok(())
    }
}

/// Simulates one grasp-and-detach attempt.
///
/// The grasp succeeds when the fruit width is within the aperture range and the
/// grasp moment at the closure angle reaches the detach budget for
/// `config.holding_force`. Detaching succeeds when the wrist can turn through the
/// rotation returned by `rotation_model`. Gate failures produce a `Fault` outcome,
/// not an error.
pub fn simulate_harvest(
    geom: &GripperGeometry,
    motor: &MotorSpec,
    fruit: &CylinderFruit,
    viewpoint: Viewpoint,
    rotation_model: &dyn RotationModel,
    wrist_speed: f64,
    config: &HarvestConfig,
) -> Result<HarvestOutcome> {
    if viewpoint == Viewpoint::BV {
        return Err(Error::domain(
            "viewpoint",
            "harvesting is simulated for FV or CV only",
        ));
    }
    if !(wrist_speed.is_finite() && wrist_speed > 0.0) {
        return Err(Error::domain(
            "wrist_speed",
            format!("must be > 0, got {wrist_speed}"),
        ));
    }
    config.validate()?;
    let holding_threshold = detach_budget(fruit, config.holding_force, config.angular_accel)?.total;

    let mut run = Run {
        state: HarvestState::Home,
        time: 0.0,
        log: Vec::with_capacity(6),
    };
    let mut outcome = HarvestOutcome {
        success: false,
        final_state: HarvestState::Home,
        closure_alpha: None,
        applied_moment: None,
        holding_threshold,
        wrist_rotation_deg: 0.0,
        detach_time_s: 0.0,
        elapsed_s: 0.0,
        event_log: Vec::new(),
    };

    run.fire(HarvestEvent::BeginStage, 0.0)?;
    run.fire(HarvestEvent::StagePoseReached, config.staging_latency_s)?;
    run.fire(HarvestEvent::FruitEnclosed, config.attach_latency_s)?;

    let fault = match alpha_for_aperture(geom, fruit.width()) {
        Err(Error::UnreachableAperture { .. }) => Some(FaultReason::Aperture),
        Err(e) => return Err(e),
        Ok(alpha) => {
            let moment = total_grasp_moment(geom, motor.rated_torque, alpha)?;
            outcome.closure_alpha = Some(alpha);
            outcome.applied_moment = Some(moment);
            (moment < holding_threshold).then_some(FaultReason::HoldingMoment)
        }
    };
    match fault {
        Some(reason) => run.fire(HarvestEvent::Abort(reason), config.grasp_latency_s)?,
        None => {
            run.fire(HarvestEvent::ClosureReached, config.grasp_latency_s)?;
            let rotation = rotation_model.required_rotation(fruit, viewpoint)?;
            if rotation > config.max_wrist_rotation_deg {
                let t = detach_time(config.max_wrist_rotation_deg, wrist_speed)?;
                outcome.wrist_rotation_deg = config.max_wrist_rotation_deg;
                outcome.detach_time_s = t;
                run.fire(HarvestEvent::Abort(FaultReason::Rotation), t)?;
            } else {
                let t = detach_time(rotation, wrist_speed)?;
                outcome.wrist_rotation_deg = rotation;
                outcome.detach_time_s = t;
                run.fire(HarvestEvent::DetachConfirmed, t)?;
            }
        }
    }

    outcome.success = run.state == HarvestState::Retrieved;
    outcome.final_state = run.state;
    outcome.elapsed_s = run.time;
    outcome.event_log = run.log;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub sample_no: u32,
    pub group: SizeGroup,
    pub viewpoint: Viewpoint,
    pub width_mm: f64,
    pub height_mm: f64,
    pub recorded_rotation_deg: f64,
    pub outcome: HarvestOutcome,
}

/// Timing summary for one (group, viewpoint) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub group: SizeGroup,
    pub viewpoint: Viewpoint,
    pub trials: usize,
    pub successes: usize,
    /// Mean detaching-phase duration over successful trials [s].
    pub mean_detach_s: Option<f64>,
    /// Mean total elapsed time over all trials [s].
    pub mean_elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub cells: Vec<CellSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignMetadata {
    pub staging_pose: Pose6D,
    pub wrist_speed_rad_s: f64,
    pub fruit_mass_kg: f64,
    pub rated_torque_nm: f64,
    pub config: HarvestConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub metadata: CampaignMetadata,
    pub summary: CampaignSummary,
    pub trials: Vec<TrialOutcome>,
}

/// Aggregates outcomes; the result does not depend on the order of `outcomes`.
pub fn summarize(outcomes: &[TrialOutcome]) -> CampaignSummary {
    let mut cells: BTreeMap<(SizeGroup, Viewpoint), Vec<&TrialOutcome>> = BTreeMap::new();
    for t in outcomes {
        cells.entry((t.group, t.viewpoint)).or_default().push(t);
    }
    let successes = outcomes.iter().filter(|t| t.outcome.success).count();
    CampaignSummary {
        trials: outcomes.len(),
        successes,
        success_rate: if outcomes.is_empty() {
            0.0
        } else {
            successes as f64 / outcomes.len() as f64
        },
        cells: cells
            .into_iter()
            .map(|((group, viewpoint), ts)| {
                let ok: Vec<f64> = ts
                    .iter()
                    .filter(|t| t.outcome.success)
                    .map(|t| t.outcome.detach_time_s)
                    .collect();
                CellSummary {
                    group,
                    viewpoint,
                    trials: ts.len(),
                    successes: ok.len(),
                    mean_detach_s: (!ok.is_empty()).then(|| datasets::stable_mean(ok)),
                    mean_elapsed_s: datasets::stable_mean(
                        ts.iter().map(|t| t.outcome.elapsed_s).collect(),
                    ),
                }
            })
            .collect(),
    }
}

/// Runs [`simulate_harvest`] for every trial, in parallel.
///
/// Each trial becomes a cylinder of its recorded width and height with mass
/// `fruit_mass`. In replay mode the recorded rotation is the required rotation;
/// in predict mode the nearest-group model over `trials` supplies it.
pub fn run_campaign(
    trials: &[GraspTrial],
    geom: &GripperGeometry,
    motor: &MotorSpec,
    wrist_speed: f64,
    fruit_mass: f64,
    config: &HarvestConfig,
) -> Result<CampaignReport> {
    if trials.is_empty() {
        return Err(Error::domain("trials", "campaign needs at least one trial"));
    }
    let outcomes = trials
        .par_iter()
        .map(|t| {
            let fruit = cylinder_from_fruit(t.width_mm / 1000.0, t.height_mm / 1000.0, fruit_mass)?
                .with_label(format!("{} #{}", t.viewpoint, t.sample_no));
            let replay = ReplayRotation(t.rotation_deg);
            let predict = NearestGroupRotation(trials);
            let model: &dyn RotationModel = match config.rotation_mode {
                RotationMode::Replay => &replay,
                RotationMode::Predict => &predict,
            };
            let outcome =
                simulate_harvest(geom, motor, &fruit, t.viewpoint, model, wrist_speed, config)?;
            Ok(TrialOutcome {
                sample_no: t.sample_no,
                group: t.group,
                viewpoint: t.viewpoint,
                width_mm: t.width_mm,
                height_mm: t.height_mm,
                recorded_rotation_deg: t.rotation_deg,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CampaignReport {
        metadata: CampaignMetadata {
            staging_pose: STAGING_POSE,
            wrist_speed_rad_s: wrist_speed,
            fruit_mass_kg: fruit_mass,
            rated_torque_nm: motor.rated_torque,
            config: config.clone(),
        },
        summary: summarize(&outcomes),
        trials: outcomes,
    })
}
