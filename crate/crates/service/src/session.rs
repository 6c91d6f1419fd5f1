use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use drawjectory_core::bundle::{waypoint_records, ErrorExport, PlanBundle, TrajectoryExport};
use drawjectory_core::pipeline::{run_pipeline, Stopwatch};
use drawjectory_core::recording::{Format, PointRecord};
use drawjectory_core::sampling::{SamplingConfig, SamplingStrategy};
use drawjectory_core::{
    recording, EditOp, FeasibilityLimits, FeasibilityReport, FlightPath, PlanRequest, PlanResult, Point,
    SimilarityReport,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopwatchEvent {
    Start,
    Stop,
}

/// A state change requested by the editor. Serialized with an `action` tag,
/// e.g. `{"action":"plan","strategy":"equidistant","n":15}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// Indices into the uploaded recording. Discards any plan.
    Trim {
        start: usize,
        end: usize,
    },
    Plan {
        strategy: SamplingStrategy,
        n: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limits: Option<FeasibilityLimits>,
    },
    Edit {
        ops: Vec<EditOp>,
    },
    Stopwatch {
        event: StopwatchEvent,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Path,
    Waypoints,
    Trajectory,
    Errors,
    Bundle,
    Similarity,
}

impl std::str::FromStr for View {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self, ServiceError> {
        Ok(match s {
            "path" => View::Path,
            "waypoints" => View::Waypoints,
            "trajectory" => View::Trajectory,
            "errors" => View::Errors,
            "bundle" => View::Bundle,
            "similarity" => View::Similarity,
            other => return Err(ServiceError::ViewUnavailable(format!("unknown view `{other}`"))),
        })
    }
}

/// Where the current trajectory is evaluated for a similarity comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilaritySampling {
    /// The control-point grid (`limits.check_step`).
    #[default]
    Control,
    /// The reference path's timestamps that fall inside the trajectory domain.
    Reference,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    upload: FlightPath,
    flight_path: FlightPath,
    plan: Option<(SamplingConfig, FeasibilityLimits)>,
    edits: Vec<EditOp>,
    current: Option<(PlanRequest, PlanResult)>,
    history: Vec<Action>,
    stopwatch: Stopwatch,
    timings: Vec<f64>,
}

impl Session {
    pub fn new(id: String, upload: FlightPath) -> Self {
        Self {
            id,
            flight_path: upload.clone(),
            upload,
            plan: None,
            edits: Vec::new(),
            current: None,
            history: Vec::new(),
            stopwatch: Stopwatch::new(),
            timings: Vec::new(),
        }
    }

    /// Rebuilds a session by applying `history` to a fresh upload.
    /// Stopwatch events are skipped since they never affect the plan.
    pub fn replay(id: String, upload: FlightPath, history: &[Action]) -> Result<Self, ServiceError> {
        let mut session = Self::new(id, upload);
        for action in history {
            if !matches!(action, Action::Stopwatch { .. }) {
                session.apply(action.clone())?;
            }
        }
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn upload(&self) -> &FlightPath {
        &self.upload
    }

    /// The upload with the current trim bounds applied.
    pub fn flight_path(&self) -> &FlightPath {
        &self.flight_path
    }

    pub fn history(&self) -> &[Action] {
        &self.history
    }

    pub fn current(&self) -> Option<&PlanResult> {
        self.current.as_ref().map(|(_, r)| r)
    }

    fn request(&self, edits: Vec<EditOp>) -> Option<PlanRequest> {
        self.plan.map(|(sampling, limits)| PlanRequest {
            flight_path: self.flight_path.clone(),
            sampling,
            limits,
            edits,
        })
    }

    /// Applies one action; on error the session is left untouched and the
    /// action is not recorded.
    pub fn apply(&mut self, action: Action) -> Result<Value, ServiceError> {
        let mut extra = json!({});
        match &action {
            Action::Trim { start, end } => {
                self.flight_path = self.upload.trim(*start, *end)?;
                self.plan = None;
                self.edits.clear();
                self.current = None;
            }
            Action::Plan { strategy, n, seed, limits } => {
                let sampling = SamplingConfig { strategy: *strategy, n: *n, seed: *seed };
                let limits = limits.unwrap_or_default();
                let request =
                    PlanRequest { flight_path: self.flight_path.clone(), sampling, limits, edits: Vec::new() };
                let result = run_pipeline(&request)?;
                self.plan = Some((sampling, limits));
                self.edits.clear();
                self.current = Some((request, result));
            }
            Action::Edit { ops } => {
                let mut edits = self.edits.clone();
                edits.extend_from_slice(ops);
                let request = self
                    .request(edits)
                    .ok_or_else(|| ServiceError::InvalidState("edit requires a planned trajectory".into()))?;
                let result = run_pipeline(&request)?;
                if !result.feasible() {
                    return Err(ServiceError::Infeasible(result.feasibility));
                }
                self.edits = request.edits.clone();
                self.current = Some((request, result));
            }
            Action::Stopwatch { event: StopwatchEvent::Start } => self.stopwatch.start(),
            Action::Stopwatch { event: StopwatchEvent::Stop } => {
                let elapsed = self.stopwatch.stop()?;
                log::info!("session {}: planning time {elapsed:.3} s", self.id);
                self.timings.push(elapsed);
                extra = json!({ "elapsed": elapsed });
            }
        }
        self.history.push(action);
        let mut summary = self.summary();
        if let (Value::Object(map), Value::Object(more)) = (&mut summary, extra) {
            map.extend(more);
        }
        Ok(summary)
    }

    pub fn summary(&self) -> Value {
        let (start, end) = self.flight_path.trim_bounds();
        let mut summary = json!({
            "id": self.id,
            "history_len": self.history.len(),
            "trim": [start, end],
            "planned": self.current.is_some(),
            "timings": self.timings,
        });
        if let Some((request, result)) = &self.current {
            summary["requested_waypoints"] = json!(request.sampling.n);
            summary["waypoint_count"] = json!(result.waypoints.len());
            summary["feasible"] = json!(result.feasible());
            summary["violations"] = json!(result.feasibility.violations.len());
            summary["rsme"] = json!(result.error.rsme);
            summary["mae"] = json!(result.error.mae);
        }
        summary
    }

    fn planned(&self) -> Result<&(PlanRequest, PlanResult), ServiceError> {
        self.current.as_ref().ok_or_else(|| ServiceError::ViewUnavailable("no trajectory has been planned".into()))
    }

    pub fn bundle(&self) -> Result<PlanBundle, ServiceError> {
        let (request, result) = self.planned()?;
        Ok(PlanBundle::new(request, result))
    }

    pub fn view(&self, view: View) -> Result<Value, ServiceError> {
        Ok(match view {
            View::Path => {
                let (start, end) = self.flight_path.trim_bounds();
                let points: Vec<PointRecord> =
                    self.upload.points().iter().map(|p| PointRecord::from_point(p, None)).collect();
                json!({ "points": points, "trim": [start, end] })
            }
            View::Waypoints => {
                let (_, result) = self.planned()?;
                json!({ "waypoints": waypoint_records(&result.waypoints) })
            }
            View::Trajectory => {
                let (_, result) = self.planned()?;
                let export = TrajectoryExport::new(&result.trajectory, result.control_points.clone());
                let errors = ErrorExport::from(&result.error);
                json!({
                    "trajectory": export,
                    "gradient": errors.gradient,
                    "feasibility": result.feasibility,
                })
            }
            View::Errors => {
                let (_, result) = self.planned()?;
                serde_json::to_value(ErrorExport::from(&result.error))?
            }
            View::Bundle => serde_json::to_value(self.bundle()?)?,
            View::Similarity => return Err(ServiceError::ViewUnavailable("similarity needs a reference path".into())),
        })
    }

    /// Compares the current trajectory with the effective points of `reference`.
    pub fn similarity(&self, reference: &FlightPath, at: SimilaritySampling) -> Result<SimilarityReport, ServiceError> {
        let (_, result) = self.planned()?;
        let (samples, targets): (Vec<Point>, Vec<Point>) = match at {
            SimilaritySampling::Control => {
                (result.control_points.iter().map(|c| c.position).collect(), reference.positions())
            }
            SimilaritySampling::Reference => {
                let overlap: Vec<_> =
                    reference.effective_points().iter().filter(|p| result.trajectory.contains(p.t)).collect();
                let samples = overlap.iter().map(|p| result.trajectory.position(p.t)).collect::<Result<_, _>>()?;
                (samples, overlap.iter().map(|p| p.position).collect())
            }
        };
        if samples.is_empty() {
            return Err(ServiceError::ViewUnavailable("reference timestamps do not overlap the trajectory".into()));
        }
        Ok(SimilarityReport::compute(&samples, &targets)?)
    }

    pub fn feasibility(&self) -> Option<&FeasibilityReport> {
        self.current().map(|r| &r.feasibility)
    }
}

/// On-disk form of a session: its upload and the actions applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub id: String,
    pub upload: Vec<PointRecord>,
    pub history: Vec<Action>,
}

impl SessionSnapshot {
    pub fn of(session: &Session) -> Self {
        Self {
            id: session.id.clone(),
            upload: session.upload.points().iter().map(|p| PointRecord::from_point(p, None)).collect(),
            history: session.history.clone(),
        }
    }

    pub fn restore(&self) -> Result<Session, ServiceError> {
        let upload = FlightPath::new(self.upload.iter().map(|r| r.to_point()).collect())?;
        Session::replay(self.id.clone(), upload, &self.history)
    }
}

/// In-memory session registry. Each session has its own lock, so actions on
/// one session are applied one at a time while sessions proceed in parallel.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self, upload: &[u8], format: Format) -> Result<String, ServiceError> {
        let path = recording::load_flight_path(upload, format)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.insert(Session::new(id.clone(), path));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn with_session<R>(&self, id: &str, f: impl FnOnce(&mut Session) -> R) -> Result<R, ServiceError> {
        let session = self.get(id)?;
        let mut guard = session.lock().expect("session poisoned");
        Ok(f(&mut guard))
    }

    pub fn apply_action(&self, id: &str, action: Action) -> Result<Value, ServiceError> {
        self.with_session(id, |s| s.apply(action))?
    }

    pub fn get_state(
        &self,
        id: &str,
        view: View,
        reference: Option<&str>,
        at: SimilaritySampling,
    ) -> Result<Value, ServiceError> {
        if view != View::Similarity {
            return self.with_session(id, |s| s.view(view))?;
        }
        let reference =
            reference.ok_or_else(|| ServiceError::ViewUnavailable("similarity needs `reference`".into()))?;
        let reference_path = if reference == "self" || reference == id {
            self.with_session(id, |s| s.flight_path().clone())?
        } else {
            self.with_session(reference, |s| s.flight_path().clone())?
        };
        let report = self.with_session(id, |s| s.similarity(&reference_path, at))??;
        Ok(serde_json::to_value(report)?)
    }

    pub fn insert(&self, session: Session) {
        let id = session.id().to_string();
        self.sessions.lock().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    }

    pub fn snapshots(&self) -> Vec<SessionSnapshot> {
        let sessions: Vec<_> = self.sessions.lock().expect("session map poisoned").values().cloned().collect();
        let mut out: Vec<_> =
            sessions.iter().map(|s| SessionSnapshot::of(&s.lock().expect("session poisoned"))).collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// Writes one `<id>.json` per session into `dir`.
    pub fn save_snapshots(&self, dir: &Path) -> Result<usize, ServiceError> {
        std::fs::create_dir_all(dir).map_err(drawjectory_core::Error::from)?;
        let snapshots = self.snapshots();
        for snap in &snapshots {
            let text = serde_json::to_string(snap)?;
            std::fs::write(dir.join(format!("{}.json", snap.id)), text).map_err(drawjectory_core::Error::from)?;
        }
        Ok(snapshots.len())
    }

    /// Replays every `*.json` snapshot found in `dir`; a missing directory is empty.
    pub fn load_snapshots(dir: &Path) -> Result<Self, ServiceError> {
        let store = Self::new();
        let entries = match std::fs::read_dir(dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(store),
            Err(e) => return Err(drawjectory_core::Error::from(e).into()),
        };
        for entry in entries {
            let path = entry.map_err(drawjectory_core::Error::from)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(drawjectory_core::Error::from)?;
            let snap: SessionSnapshot = serde_json::from_str(&text)?;
            store.insert(snap.restore()?);
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
