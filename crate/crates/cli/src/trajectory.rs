//! Trajectory CSV: `t, x_1..x_n, v_1..v_n, segment_id`, original coordinates.
//!
//! Segment `j` is written as its post-impact row (when `j > 0`), its grid
//! rows, then its pre-impact row (when `j` is not the last segment). Each
//! impact therefore appears twice, once with `v_pre` closing the segment
//! before it and once with `v_post` opening the segment after it.

use std::io::{Read, Write};

use anyhow::{bail, ensure, Context, Result};
use billiard_bvp::{BilliardSolution, BoxDomain, ImpactEvent, Point, Segment};

fn header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("x_{i}")));
    h.extend((1..=n).map(|i| format!("v_{i}")));
    h.push("segment_id".into());
    h
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(sol: &BilliardSolution<f64>, out: W) -> Result<()> {
    let n = sol.dim();
    let shift = &sol.shift;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(n))?;
    let mut row = |t: f64, x: &[f64], v: &[f64], id: usize| -> Result<()> {
        let mut rec = Vec::with_capacity(2 * n + 2);
        rec.push(number(t));
        rec.extend(x.iter().zip(shift.iter()).map(|(a, s)| number(a + s)));
        rec.extend(v.iter().map(|&a| number(a)));
        rec.push(id.to_string());
        w.write_record(rec)?;
        Ok(())
    };
    let last = sol.segments.len() - 1;
    for seg in &sol.segments {
        if seg.id > 0 {
            let e = &sol.impacts[seg.id - 1];
            row(e.time, &e.point, &e.v_post, seg.id)?;
        }
        for (j, &t) in seg.times.iter().enumerate() {
            row(
                t,
                &seg.positions[j * n..(j + 1) * n],
                &seg.velocities[j * n..(j + 1) * n],
                seg.id,
            )?;
        }
        if seg.id < last {
            let e = &sol.impacts[seg.id];
            row(e.time, &e.point, &e.v_pre, seg.id)?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Row {
    t: f64,
    x: Vec<f64>,
    v: Vec<f64>,
    segment: usize,
}

/// Reads a trajectory written by [`write_csv`]. `domain` is the anchored box
/// and `shift` its original lower corner; `start` / `end` are in anchored
/// coordinates.
pub fn read_csv<R: Read>(
    input: R,
    domain: &BoxDomain<f64>,
    shift: &[f64],
    horizon: f64,
    start: &[f64],
    end: &[f64],
) -> Result<BilliardSolution<f64>> {
    let n = domain.dim();
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    ensure!(
        found == header(n),
        "CSV header {found:?} does not match a {n}-dimensional trajectory"
    );
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .with_context(|| format!("row {}: column {} is not a number", line + 1, i + 1))
        };
        let t = parse(0)?;
        let x = (0..n)
            .map(|i| Ok(parse(1 + i)? - shift[i]))
            .collect::<Result<Vec<_>>>()?;
        let v = (0..n)
            .map(|i| parse(1 + n + i))
            .collect::<Result<Vec<_>>>()?;
        let segment = rec[2 * n + 1]
            .trim()
            .parse()
            .with_context(|| format!("row {}: bad segment_id", line + 1))?;
        rows.push(Row { t, x, v, segment });
    }
    ensure!(!rows.is_empty(), "CSV has no rows");

    let segment_count = rows.last().map(|r| r.segment + 1).unwrap_or(0);
    let mut groups: Vec<Vec<Row>> = (0..segment_count).map(|_| Vec::new()).collect();
    let mut previous = 0;
    for row in rows {
        ensure!(
            row.segment == previous || row.segment == previous + 1,
            "segment ids must increase by one"
        );
        previous = row.segment;
        groups[row.segment].push(row);
    }

    let face_tol = domain.min_edge() * 1e-9;
    let mut pre_rows = Vec::new();
    let mut post_rows = Vec::new();
    let mut segments = Vec::with_capacity(segment_count);
    let last = segment_count - 1;
    for (id, mut rows) in groups.into_iter().enumerate() {
        if id < last {
            pre_rows.push(rows.pop().context("empty segment")?);
        }
        if id > 0 {
            ensure!(!rows.is_empty(), "segment {id} has no post-impact row");
            post_rows.push(rows.remove(0));
        }
        let start_t = post_rows.last().filter(|_| id > 0).map_or(0.0, |r| r.t);
        let end_t = pre_rows
            .last()
            .filter(|_| id < last)
            .map_or(horizon, |r| r.t);
        segments.push(Segment {
            id,
            start: start_t,
            end: end_t,
            times: rows.iter().map(|r| r.t).collect(),
            positions: rows.iter().flat_map(|r| r.x.iter().copied()).collect(),
            velocities: rows.iter().flat_map(|r| r.v.iter().copied()).collect(),
            unfolded: None,
        });
    }
    let mut impacts = Vec::with_capacity(pre_rows.len());
    for (pre, post) in pre_rows.into_iter().zip(post_rows) {
        if pre.t != post.t {
            bail!("impact rows at t = {} and t = {} disagree", pre.t, post.t);
        }
        let axes = (0..n)
            .filter(|&i| {
                pre.x[i].abs() <= face_tol || (pre.x[i] - domain.edge(i)).abs() <= face_tol
            })
            .collect();
        impacts.push(ImpactEvent {
            time: pre.t,
            point: pre.x,
            axes,
            v_pre: pre.v,
            v_post: post.v,
        });
    }
    Ok(BilliardSolution::from_parts(
        domain.clone(),
        horizon,
        segments,
        impacts,
        Point::from(start),
        Point::from(end),
        Point::from(shift),
    )?)
}
