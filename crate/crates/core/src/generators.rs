//! Programmatic generators for the three case-study models, emitting
//! modeling-language source text.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ParamError(pub String);

/// Virus spreading on an m x n grid of computers (4-neighbor adjacency).
/// The attacker infects firewall-protected neighbors of infected nodes
/// (success probability `a`), the defender cleans infected nodes (success
/// probability `c`); the top-left origin can never be cleaned.
#[derive(Debug, Clone, Copy)]
pub struct VirusParams {
    pub m: usize,
    pub n: usize,
    /// Probability of breaching a target's firewall.
    pub a: f64,
    /// Detection/clean probability of an infected node.
    pub c: f64,
}

impl Default for VirusParams {
    fn default() -> Self {
        VirusParams {
            m: 3,
            n: 2,
            a: 0.5,
            c: 0.2,
        }
    }
}

pub fn gen_virus(params: &VirusParams) -> Result<String, ParamError> {
    let VirusParams { m, n, a, c } = *params;
    if m * n < 2 {
        return Err(ParamError("virus grid needs at least 2 nodes".into()));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(ParamError(format!("attack probability {a} outside (0,1]")));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(ParamError(format!("clean probability {c} outside [0,1]")));
    }
    let count = m * n;
    let idx = |r: usize, col: usize| r * n + col;
    let mut adjacent: Vec<(usize, usize)> = Vec::new();
    for r in 0..m {
        for col in 0..n {
            if col + 1 < n {
                adjacent.push((idx(r, col), idx(r, col + 1)));
            }
            if r + 1 < m {
                adjacent.push((idx(r, col), idx(r + 1, col)));
            }
        }
    }

    let mut out = String::from("smg\n\nmodule grid\n");
    for i in 0..count {
        let init = usize::from(i == 0);
        let _ = writeln!(out, "  n{i} : [0..1] init {init};");
    }
    out.push_str("  turn : [0..1] init 0;\n\n");

    // attacker: infect an uninfected neighbor of an infected node
    for &(i, j) in &adjacent {
        for (src, dst) in [(i, j), (j, i)] {
            let guard = format!("turn=0 & n{src}=1 & n{dst}=0");
            if a == 1.0 {
                let _ = writeln!(
                    out,
                    "  [attack_{src}_{dst}] {guard} -> 1:(n{dst}'=1)&(turn'=1);"
                );
            } else {
                let _ = writeln!(
                    out,
                    "  [attack_{src}_{dst}] {guard} -> {a}:(n{dst}'=1)&(turn'=1) + {}:(turn'=1);",
                    1.0 - a
                );
            }
        }
    }
    // on a connected grid the attacker is stuck exactly when every node is
    // infected (the origin is always infected)
    let all_infected: Vec<String> = (0..count).map(|i| format!("n{i}=1")).collect();
    let _ = writeln!(
        out,
        "  [askip] turn=0 & {} -> 1:(turn'=1);",
        all_infected.join(" & ")
    );
    out.push('\n');

    // defender: clean any infected node except the origin
    for i in 1..count {
        let guard = format!("turn=1 & n{i}=1");
        if c == 0.0 {
            let _ = writeln!(out, "  [clean_{i}] {guard} -> 1:(turn'=0);");
        } else if c == 1.0 {
            let _ = writeln!(out, "  [clean_{i}] {guard} -> 1:(n{i}'=0)&(turn'=0);");
        } else {
            let _ = writeln!(
                out,
                "  [clean_{i}] {guard} -> {c}:(n{i}'=0)&(turn'=0) + {}:(turn'=0);",
                1.0 - c
            );
        }
    }
    let none_cleanable: Vec<String> = (1..count).map(|i| format!("n{i}=0")).collect();
    let _ = writeln!(
        out,
        "  [dskip] turn=1 & {} -> 1:(turn'=0);",
        none_cleanable.join(" & ")
    );
    out.push_str("endmodule\n\n");

    let mut attacker_actions: Vec<String> = adjacent
        .iter()
        .flat_map(|&(i, j)| {
            [format!("[attack_{i}_{j}]"), format!("[attack_{j}_{i}]")]
        })
        .collect();
    attacker_actions.push("[askip]".into());
    let _ = writeln!(out, "player attacker grid, {} endplayer", attacker_actions.join(", "));
    let mut defender_actions: Vec<String> =
        (1..count).map(|i| format!("[clean_{i}]")).collect();
    defender_actions.push("[dskip]".into());
    let _ = writeln!(out, "player defender {} endplayer", defender_actions.join(", "));

    out.push_str("\nrewards \"infections\"\n");
    for i in 0..count {
        let _ = writeln!(out, "  n{i}=1 : 1;");
    }
    out.push_str("endrewards\n");
    out.push_str("\nlabel \"saturated\" = ");
    out.push_str(&all_infected.join(" & "));
    out.push_str(";\n");
    Ok(out)
}

/// Two robots competing over resources on an N x N grid: robot 1 ferries
/// fuel from the opponent's starting corner back to its own, robot 2 roams
/// adversarially; every move fails (the robot stays) with `p_failure`.
#[derive(Debug, Clone, Copy)]
pub struct CtfParams {
    pub n: usize,
    pub p_failure: f64,
}

impl Default for CtfParams {
    fn default() -> Self {
        CtfParams {
            n: 3,
            p_failure: 0.1,
        }
    }
}

pub fn gen_ctf(params: &CtfParams) -> Result<String, ParamError> {
    let CtfParams { n, p_failure: pf } = *params;
    if n < 2 {
        return Err(ParamError("ctf grid side must be at least 2".into()));
    }
    if !(0.0..1.0).contains(&pf) {
        return Err(ParamError(format!("p_failure {pf} outside [0,1)")));
    }
    let top = n - 1;
    let mut out = String::from("smg\n\nmodule arena\n");
    let _ = writeln!(out, "  x1 : [0..{top}] init 0;");
    let _ = writeln!(out, "  y1 : [0..{top}] init 0;");
    let _ = writeln!(out, "  x2 : [0..{top}] init {top};");
    let _ = writeln!(out, "  y2 : [0..{top}] init {top};");
    out.push_str("  carry : [0..1] init 0;\n");
    out.push_str("  turn : [0..1] init 0;\n\n");

    // a move command with failure probability pf; `assign` is the
    // successful coordinate change
    let mut movement = |label: &str, guard: &str, assign: &str, next_turn: usize| {
        if pf == 0.0 {
            let _ = writeln!(out, "  [{label}] {guard} -> 1:({assign})&(turn'={next_turn});");
        } else {
            let _ = writeln!(
                out,
                "  [{label}] {guard} -> {}:({assign})&(turn'={next_turn}) + {pf}:(turn'={next_turn});",
                1.0 - pf
            );
        }
    };
    for (robot, next_turn) in [(1, 1), (2, 0)] {
        let t = robot - 1;
        movement(
            &format!("r{robot}e"),
            &format!("turn={t} & x{robot}<{top}"),
            &format!("x{robot}'=x{robot}+1"),
            next_turn,
        );
        movement(
            &format!("r{robot}w"),
            &format!("turn={t} & x{robot}>0"),
            &format!("x{robot}'=x{robot}-1"),
            next_turn,
        );
        movement(
            &format!("r{robot}n"),
            &format!("turn={t} & y{robot}<{top}"),
            &format!("y{robot}'=y{robot}+1"),
            next_turn,
        );
        movement(
            &format!("r{robot}s"),
            &format!("turn={t} & y{robot}>0"),
            &format!("y{robot}'=y{robot}-1"),
            next_turn,
        );
    }
    let _ = writeln!(
        out,
        "  [pickup] turn=0 & x1={top} & y1={top} & carry=0 -> 1:(carry'=1)&(turn'=1);"
    );
    out.push_str("  [deliver] turn=0 & x1=0 & y1=0 & carry=1 -> 1:(carry'=0)&(turn'=1);\n");
    out.push_str("endmodule\n\n");

    out.push_str(
        "player robot1 arena, [r1e], [r1w], [r1n], [r1s], [pickup], [deliver] endplayer\n",
    );
    out.push_str("player robot2 [r2e], [r2w], [r2n], [r2s] endplayer\n");
    out.push_str("\nrewards \"fuel\"\n  [deliver] true : 1;\nendrewards\n");
    let _ = writeln!(out, "\nlabel \"r1_at_goal\" = x1={top} & y1={top};");
    Ok(out)
}

/// Warehouse floor of (n+1) x 3 cells: the shielded robot moves
/// deterministically, the other robot moves with a 10% slip, and `crash`
/// marks cell collisions. Reward "delivered" pays at the delivery cell,
/// "cost" charges the waiting penalty.
#[derive(Debug, Clone, Copy)]
pub struct WarehouseParams {
    /// Shelf columns; the floor plan is (n+1) x 3.
    pub n: usize,
    /// Shielding horizon the model is meant to be checked with.
    pub horizon: u32,
    /// Relative threshold the model is meant to be shielded with.
    pub lambda: f64,
    /// Penalty per waiting step in the "cost" reward.
    pub waiting_penalty: f64,
}

impl Default for WarehouseParams {
    fn default() -> Self {
        WarehouseParams {
            n: 2,
            horizon: 14,
            lambda: 0.9,
            waiting_penalty: 1.0,
        }
    }
}

pub fn gen_warehouse(params: &WarehouseParams) -> Result<String, ParamError> {
    let WarehouseParams {
        n,
        waiting_penalty,
        ..
    } = *params;
    if n < 2 {
        return Err(ParamError("warehouse needs at least 2 shelf columns".into()));
    }
    let right = n; // x ranges over 0..=n
    let mut out = String::from("smg\n\nmodule floor\n");
    out.push_str("  move : [0..1] init 0;\n");
    let _ = writeln!(out, "  x1 : [0..{right}] init 0;");
    out.push_str("  y1 : [0..2] init 0;\n");
    let _ = writeln!(out, "  x2 : [0..{right}] init {right};");
    out.push_str("  y2 : [0..2] init 2;\n\n");

    // the shielded robot moves deterministically; grid directions follow
    // the compass with y growing southward (n decreases y)
    let _ = writeln!(out, "  [e] move=0 & x1<{right} -> 1:(x1'=x1+1)&(move'=1);");
    out.push_str("  [s] move=0 & y1<2 -> 1:(y1'=y1+1)&(move'=1);\n");
    out.push_str("  [w] move=0 & x1>0 -> 1:(x1'=x1-1)&(move'=1);\n");
    out.push_str("  [n] move=0 & y1>0 -> 1:(y1'=y1-1)&(move'=1);\n");
    out.push_str("  [wait] move=0 -> 1:(move'=1);\n\n");

    // the other robot is adversarial and slips 10% of the time
    let _ = writeln!(
        out,
        "  [ae] move=1 & x2<{right} -> 0.9:(x2'=x2+1)&(move'=0) + 0.1:(move'=0);"
    );
    out.push_str("  [as] move=1 & y2<2 -> 0.9:(y2'=y2+1)&(move'=0) + 0.1:(move'=0);\n");
    out.push_str("  [aw] move=1 & x2>0 -> 0.9:(x2'=x2-1)&(move'=0) + 0.1:(move'=0);\n");
    out.push_str("  [an] move=1 & y2>0 -> 0.9:(y2'=y2-1)&(move'=0) + 0.1:(move'=0);\n");
    out.push_str("  [await] move=1 -> 1:(move'=0);\n");
    out.push_str("endmodule\n\n");

    out.push_str("player shield floor, [e], [s], [w], [n], [wait] endplayer\n");
    out.push_str("player env [ae], [as], [aw], [an], [await] endplayer\n");

    out.push_str("\nlabel \"crash\" = x1=x2 & y1=y2;\n");
    let _ = writeln!(
        out,
        "\nrewards \"delivered\"\n  x1={right} & y1=1 : 1;\nendrewards"
    );
    let _ = writeln!(
        out,
        "\nrewards \"cost\"\n  [wait] true : {waiting_penalty};\n  x1=x2 & y1=y2 : 10;\nendrewards"
    );
    Ok(out)
}
