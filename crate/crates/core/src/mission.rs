//! A small mission-script language that produces programmed reference paths.
//!
//! ```text
//! # comment
//! start(3, 1.5, 1, 0)          # optional: x, y, z, heading
//! takeoff(1.0)
//! moveTo(2, 0, 1, 0)           # x, y, z, psi (heading change)
//! arcLeft(8, 1, 2, 1, 0, 3.14159, 0.5, 0.5)
//! land()
//! ```
//!
//! `arcLeft(n, x, y, z, phi, angle, forward, lateral)` starts at `(x, y, z)`
//! and emits `n` waypoints spaced evenly in the ellipse parameter along an
//! arc of sweep `angle`. The ellipse radius `forward` lies along the initial
//! arc direction (current heading rotated by `phi`) and `lateral` along its
//! left normal; `arcRight` mirrors it.

use crate::recording::{FlightPath, TrackedPoint};
use crate::spline::sample_times;
use crate::{Error, Result, Scalar, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Turn {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<T> {
    pub turn: Turn,
    pub n: usize,
    pub entry: Vec3<T>,
    pub phi: T,
    pub angle: T,
    pub forward: T,
    pub lateral: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MissionCommand<T> {
    Takeoff { z: T },
    Land,
    MoveTo { target: Vec3<T>, psi: T },
    Arc(Arc<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionState<T> {
    pub position: Vec3<T>,
    /// Direction in the xy-plane, in `(-pi, pi]`.
    pub heading: T,
}

impl<T: Scalar> Default for MissionState<T> {
    fn default() -> Self {
        Self { position: Vec3::new(T::lit(0.5), T::lit(0.5), T::zero()), heading: T::zero() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mission<T> {
    pub start: MissionState<T>,
    pub commands: Vec<MissionCommand<T>>,
}

pub fn normalize_angle<T: Scalar>(angle: T) -> T {
    let tau = T::TAU();
    let pi = T::PI();
    let wrapped = (angle + pi) - tau * ((angle + pi) / tau).floor() - pi;
    if wrapped <= -pi {
        wrapped + tau
    } else {
        wrapped
    }
}

struct Call<'a> {
    name: &'a str,
    args: Vec<(&'a str, usize)>,
}

fn split_call(line_no: usize, text: &str, offset: usize) -> Result<Call<'_>> {
    let syntax = |column: usize, message: &str| Error::Syntax { line: line_no, column, message: message.into() };
    let open = text.find('(').ok_or_else(|| syntax(offset + text.len() + 1, "expected `(`"))?;
    let name = text[..open].trim_end();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(syntax(offset + 1, "expected a command name"));
    }
    if !text.ends_with(')') {
        return Err(syntax(offset + text.len() + 1, "expected `)` at end of line"));
    }
    let inner = &text[open + 1..text.len() - 1];
    if inner.contains('(') || inner.contains(')') {
        return Err(syntax(offset + open + 2, "unexpected parenthesis"));
    }
    let mut args = Vec::new();
    if !inner.trim().is_empty() {
        let mut col = offset + open + 2;
        for raw in inner.split(',') {
            let lead = raw.len() - raw.trim_start().len();
            args.push((raw.trim(), col + lead));
            col += raw.len() + 1;
        }
    }
    Ok(Call { name, args })
}

fn number<T: Scalar>(line: usize, (text, column): (&str, usize)) -> Result<T> {
    text.parse::<f64>().ok().filter(|v| v.is_finite()).map(T::lit).ok_or_else(|| Error::Syntax {
        line,
        column,
        message: format!("expected a number, found `{text}`"),
    })
}

fn count(line: usize, (text, column): (&str, usize)) -> Result<usize> {
    text.parse::<usize>().map_err(|_| Error::Syntax {
        line,
        column,
        message: format!("expected a non-negative integer, found `{text}`"),
    })
}

fn invalid(line: usize, message: &str) -> Error {
    Error::InvalidArgument(format!("line {line}: {message}"))
}

pub fn parse_mission<T: Scalar>(text: &str) -> Result<Mission<T>> {
    let mut start = None;
    let mut commands = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = code.len() - code.trim_start().len();
        let call = split_call(line, trimmed, offset)?;
        let expected = match call.name {
            "start" | "moveTo" => 4,
            "takeoff" => 1,
            "land" => 0,
            "arcLeft" | "arcRight" => 8,
            other => return Err(Error::UnknownCommand { line, name: other.into() }),
        };
        if call.args.len() != expected {
            return Err(Error::Arity { line, name: call.name.into(), expected, found: call.args.len() });
        }
        let num = |k: usize| number::<T>(line, call.args[k]);
        let command = match call.name {
            "start" => {
                if start.is_some() || !commands.is_empty() {
                    return Err(Error::Syntax {
                        line,
                        column: offset + 1,
                        message: "`start` must be the first command".into(),
                    });
                }
                start = Some(MissionState {
                    position: Vec3::new(num(0)?, num(1)?, num(2)?),
                    heading: normalize_angle(num(3)?),
                });
                continue;
            }
            "takeoff" => {
                let z = num(0)?;
                if !(z > T::zero()) {
                    return Err(invalid(line, "takeoff altitude must be positive"));
                }
                MissionCommand::Takeoff { z }
            }
            "land" => MissionCommand::Land,
            "moveTo" => MissionCommand::MoveTo { target: Vec3::new(num(0)?, num(1)?, num(2)?), psi: num(3)? },
            _ => {
                let n = count(line, call.args[0])?;
                if n < 2 {
                    return Err(invalid(line, "arcs need at least 2 waypoints"));
                }
                let (forward, lateral) = (num(6)?, num(7)?);
                if !(forward > T::zero() && lateral > T::zero()) {
                    return Err(invalid(line, "arc radii must be positive"));
                }
                MissionCommand::Arc(Arc {
                    turn: if call.name == "arcLeft" { Turn::Left } else { Turn::Right },
                    n,
                    entry: Vec3::new(num(1)?, num(2)?, num(3)?),
                    phi: num(4)?,
                    angle: num(5)?,
                    forward,
                    lateral,
                })
            }
        };
        commands.push(command);
    }
    Ok(Mission { start: start.unwrap_or_default(), commands })
}

impl<T: Scalar> Arc<T> {
    /// Arc waypoints including the entry point, and the exit heading.
    pub fn waypoints(&self, heading: T) -> (Vec<Vec3<T>>, T) {
        let direction = heading + self.phi;
        let (sin, cos) = direction.sin_cos();
        let along = Vec3::new(cos, sin, T::zero());
        let normal = match self.turn {
            Turn::Left => Vec3::new(-sin, cos, T::zero()),
            Turn::Right => Vec3::new(sin, -cos, T::zero()),
        };
        let last = T::from_usize_lossy(self.n - 1);
        let points = (0..self.n)
            .map(|k| {
                let theta = self.angle * T::from_usize_lossy(k) / last;
                let (s, c) = theta.sin_cos();
                self.entry + along * (self.forward * s) + normal * (self.lateral * (T::one() - c))
            })
            .collect();
        let (s, c) = self.angle.sin_cos();
        let tangent = along * (self.forward * c) + normal * (self.lateral * s);
        (points, normalize_angle(tangent.y.atan2(tangent.x)))
    }
}

impl<T: Scalar> Mission<T> {
    /// Polyline vertices visited by the mission, zero-length moves removed,
    /// together with the final state.
    pub fn waypoints(&self) -> (Vec<Vec3<T>>, MissionState<T>) {
        let mut state = self.start;
        let mut vertices = vec![state.position];
        let push = |vertices: &mut Vec<Vec3<T>>, p: Vec3<T>| {
            if vertices.last() != Some(&p) {
                vertices.push(p);
            }
        };
        for command in &self.commands {
            match *command {
                MissionCommand::Takeoff { z } => {
                    state.position.z = z;
                    push(&mut vertices, state.position);
                }
                MissionCommand::Land => {
                    state.position.z = T::zero();
                    push(&mut vertices, state.position);
                }
                MissionCommand::MoveTo { target, psi } => {
                    state.position = target;
                    state.heading = normalize_angle(state.heading + psi);
                    push(&mut vertices, target);
                }
                MissionCommand::Arc(arc) => {
                    let (points, exit_heading) = arc.waypoints(state.heading);
                    for p in points {
                        push(&mut vertices, p);
                    }
                    state.position = *vertices.last().expect("non-empty");
                    state.heading = exit_heading;
                }
            }
        }
        (vertices, state)
    }
}

/// Densifies the mission polyline at constant `cruise_speed`, emitting a
/// point every `emit_step` seconds plus the final vertex.
pub fn execute_mission<T: Scalar>(mission: &Mission<T>, cruise_speed: T, emit_step: T) -> Result<FlightPath<T>> {
    if !(cruise_speed > T::zero()) || !cruise_speed.is_finite() {
        return Err(Error::InvalidArgument("cruise speed must be positive".into()));
    }
    let (vertices, _) = mission.waypoints();
    let mut cumulative = Vec::with_capacity(vertices.len());
    let mut total = T::zero();
    cumulative.push(total);
    for w in vertices.windows(2) {
        total = total + w[0].distance(w[1]);
        cumulative.push(total);
    }
    if !(total > T::zero()) {
        return Err(Error::TooFewPoints { required: 2, found: 1 });
    }
    let times = sample_times(T::zero(), total / cruise_speed, emit_step)?;
    let last = times.len() - 1;
    let points = times
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let position = if k == last {
                vertices[vertices.len() - 1]
            } else {
                let s = t * cruise_speed;
                let seg = cumulative.partition_point(|&c| c <= s).clamp(1, vertices.len() - 1) - 1;
                let len = cumulative[seg + 1] - cumulative[seg];
                vertices[seg].lerp(vertices[seg + 1], (s - cumulative[seg]) / len)
            };
            TrackedPoint { t, position }
        })
        .collect();
    FlightPath::new(points)
}
