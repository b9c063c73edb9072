use serde::{Deserialize, Serialize};

use super::descriptor::MapDescriptor;
use crate::error::{Error, Result};
use crate::order::{Interval, Rational};

/// Breakpoints examined before the probe gives up on an exact answer.
pub const PROBE_BREAKPOINT_LIMIT: usize = 4096;

/// Where a map moves points inside a bounded window.
///
/// With `exact` set, the report is a complete description: `moved` is the
/// set of moved points, `fixed_intervals` the nondegenerate intervals of
/// fixed points, and `fixed_points` the remaining isolated fixed points.
/// Otherwise the report only lists what sampling saw: every listed interval
/// or point is verified, but gaps between samples are unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportReport {
    pub window: Interval,
    pub moved_subintervals: Vec<Interval>,
    pub fixed_points_found: Vec<Rational>,
    pub fixed_intervals: Vec<Interval>,
    pub exact: bool,
}

impl SupportReport {
    pub fn is_fixed_everywhere(&self) -> bool {
        self.exact && self.moved_subintervals.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cell {
    Moved,
    Fixed,
}

/// Cells alternate point, open gap, point, ... along the window; each carries
/// its verdict. Runs of moved cells become moved intervals.
fn collect(
    points: &[Rational],
    point_state: &[Cell],
    gap_state: &[Cell],
) -> (Vec<Interval>, Vec<Rational>, Vec<Interval>) {
    // flatten into a sequence of (is_point, index, state)
    let mut seq: Vec<(bool, usize, Cell)> = Vec::new();
    for i in 0..points.len() {
        seq.push((true, i, point_state[i]));
        if i < gap_state.len() {
            seq.push((false, i, gap_state[i]));
        }
    }
    let mut moved = Vec::new();
    let mut fixed_intervals = Vec::new();
    let mut k = 0;
    while k < seq.len() {
        let state = seq[k].2;
        let mut e = k;
        while e + 1 < seq.len() && seq[e + 1].2 == state {
            e += 1;
        }
        let (s, t) = (seq[k], seq[e]);
        // a lone point has no extent
        if !(s.0 && k == e) {
            let lo = points[s.1].clone();
            let hi = if t.0 { points[t.1].clone() } else { points[t.1 + 1].clone() };
            let interval = Interval::new(Some(lo), s.0, Some(hi), t.0).expect("nonempty run");
            match state {
                Cell::Moved => moved.push(interval),
                Cell::Fixed => fixed_intervals.push(interval),
            }
        }
        k = e + 1;
    }
    let isolated = points
        .iter()
        .zip(point_state)
        .filter(|(p, s)| **s == Cell::Fixed && !fixed_intervals.iter().any(|i: &Interval| i.contains(p)))
        .map(|(p, _)| p.clone())
        .collect();
    (moved, isolated, fixed_intervals)
}

/// Finds the moved set of `d` inside a bounded window.
///
/// When every breakpoint in the window is known the map is affine between
/// them and the answer is exact; otherwise `density` evenly spaced samples
/// are taken between consecutive known points and only verified facts are
/// reported.
pub fn support_probe(d: &MapDescriptor, window: &Interval, density: usize) -> Result<SupportReport> {
    let (Some(lo), Some(hi)) = (window.lower(), window.upper()) else {
        return Err(Error::Precondition("probe window must be bounded".into()));
    };
    if density == 0 {
        return Err(Error::Precondition("density must be positive".into()));
    }
    let bp = d.breakpoints(window, PROBE_BREAKPOINT_LIMIT)?;
    let mut points = vec![lo.clone()];
    points.extend(bp.points.into_iter().filter(|x| window.contains(x)));
    points.push(hi.clone());
    points.sort();
    points.dedup();
    let delta = |x: &Rational| -> Result<Rational> { Ok(d.eval(x)? - x.clone()) };

    if bp.complete {
        // exact: the displacement is affine on each gap
        let mut all_points = Vec::new();
        let mut gaps = Vec::new();
        let mut states = Vec::new();
        let deltas = points.iter().map(&delta).collect::<Result<Vec<_>>>()?;
        for i in 0..points.len() {
            all_points.push(points[i].clone());
            states.push(if deltas[i].is_zero() { Cell::Fixed } else { Cell::Moved });
            if i + 1 == points.len() {
                break;
            }
            let (du, dv) = (&deltas[i], &deltas[i + 1]);
            if du.is_zero() && dv.is_zero() {
                gaps.push(Cell::Fixed);
            } else if (du.is_positive() && dv.is_negative()) || (du.is_negative() && dv.is_positive()) {
                // one interior zero splits the gap
                let t = du / &(du - dv);
                let z = Rational::lerp(&points[i], &points[i + 1], &t);
                gaps.push(Cell::Moved);
                all_points.push(z);
                states.push(Cell::Fixed);
                gaps.push(Cell::Moved);
            } else {
                gaps.push(Cell::Moved);
            }
        }
        // trim the window's own endpoints to its closure
        let (moved, fixed, fixed_intervals) = collect(&all_points, &states, &gaps);
        let clip = |v: Vec<Interval>| v.into_iter().filter_map(|i| i.intersection(window)).collect();
        return Ok(SupportReport {
            window: window.clone(),
            moved_subintervals: clip(moved),
            fixed_points_found: fixed.into_iter().filter(|x| window.contains(x)).collect(),
            fixed_intervals: clip(fixed_intervals),
            exact: true,
        });
    }

    let mut samples = Vec::with_capacity(points.len() * (density + 1));
    for w in points.windows(2) {
        samples.push(w[0].clone());
        for k in 1..=density {
            samples.push(Rational::lerp(&w[0], &w[1], &Rational::new(k as i64, density as i64 + 1)));
        }
    }
    samples.push(hi.clone());
    let mut moved = Vec::new();
    let mut fixed = Vec::new();
    let mut run: Option<(Rational, Rational)> = None;
    for x in samples.into_iter().filter(|x| window.contains(x)) {
        if delta(&x)?.is_zero() {
            fixed.push(x);
            if let Some((a, b)) = run.take() {
                moved.push(Interval::closed(a, b)?);
            }
        } else {
            run = Some(match run {
                Some((a, _)) => (a, x),
                None => (x.clone(), x),
            });
        }
    }
    if let Some((a, b)) = run {
        moved.push(Interval::closed(a, b)?);
    }
    Ok(SupportReport {
        window: window.clone(),
        moved_subintervals: moved,
        fixed_points_found: fixed,
        fixed_intervals: Vec::new(),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::q;
    use crate::plmap::descriptor::{PatchPart, Region};
    use crate::plmap::FinitePl;

    fn example_f() -> MapDescriptor {
        let pattern = FinitePl::from_knots(vec![
            (q(0, 1), q(0, 1)),
            (q(1, 1), q(13, 4)),
            (q(2, 1), q(7, 2)),
            (q(4, 1), q(4, 1)),
        ])
        .unwrap();
        MapDescriptor::periodic(q(4, 1), pattern).unwrap()
    }

    #[test]
    fn example_fixed_points_are_multiples_of_four() {
        for density in [1, 5, 50] {
            let report =
                support_probe(&example_f(), &Interval::closed(q(0, 1), q(8, 1)).unwrap(), density)
                    .unwrap();
            assert!(report.exact);
            assert_eq!(report.fixed_points_found, vec![q(0, 1), q(4, 1), q(8, 1)]);
            assert_eq!(
                report.moved_subintervals,
                vec![
                    Interval::open(q(0, 1), q(4, 1)).unwrap(),
                    Interval::open(q(4, 1), q(8, 1)).unwrap()
                ]
            );
        }
    }

    #[test]
    fn identity_has_no_moved_points() {
        let report =
            support_probe(&MapDescriptor::Identity, &Interval::closed(q(0, 1), q(1, 1)).unwrap(), 3)
                .unwrap();
        assert!(report.is_fixed_everywhere());
        assert_eq!(report.fixed_intervals, vec![Interval::closed(q(0, 1), q(1, 1)).unwrap()]);
    }

    #[test]
    fn trivial_extension_is_fixed_outside() {
        let lambda = Interval::open(q(0, 1), q(4, 1)).unwrap();
        let ext = MapDescriptor::patched(vec![PatchPart {
            region: Region::Interval { interval: lambda },
            map: example_f(),
        }])
        .unwrap();
        let outside = support_probe(&ext, &Interval::closed(q(5, 1), q(6, 1)).unwrap(), 4).unwrap();
        assert!(outside.is_fixed_everywhere());
        let inside = support_probe(&ext, &Interval::closed(q(1, 1), q(2, 1)).unwrap(), 4).unwrap();
        assert_eq!(
            inside.moved_subintervals,
            vec![Interval::closed(q(1, 1), q(2, 1)).unwrap()]
        );
    }

    #[test]
    fn interior_zero_is_found() {
        // crosses the diagonal at 1
        let d = MapDescriptor::finite(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(3, 4)), (q(3, 2), q(5, 4)), (q(2, 1), q(2, 1))])
            .unwrap();
        let report = support_probe(&d, &Interval::closed(q(-1, 1), q(3, 1)).unwrap(), 1).unwrap();
        assert_eq!(report.fixed_points_found, vec![q(1, 1)]);
        assert_eq!(report.moved_subintervals.len(), 2);
        assert_eq!(report.fixed_intervals.len(), 2);
    }
}
