"""Worked examples shared by several test modules."""
from focusmu.calculus import Calculus
from focusmu.syntax import negation_closed_context

PHI1 = "mu x.(<a'>x | p)"
PSI1 = "nu y.([a]y & mu x.(<a'>x | p))"
PHI2 = "nu x.<a><a'>x"

NPHI1 = f"~({PHI1})"
DPHI2 = f"<a><a'>({PHI2})"
CPHI2 = f"<a'>({PHI2})"

CALC1 = Calculus(negation_closed_context([PHI1, PSI1]))
CALC2 = Calculus(negation_closed_context(["<a>p", PHI2]))

PSI_ROOT = f"~p [f], {PSI1} [f]"
LOOP_ROOT = f"[a]~p [f], {PHI2} [f]"

# (name, calculus, conclusion, principal, expected premiss) for reference modal steps with hand-computed premisses
MODAL_STEPS = [
    ("first-box-step", CALC1,
     f"~p [f], [a]({PSI1}) [f], {NPHI1} [u]", f"[a]({PSI1}) [f]",
     f"{PSI1} [f], [a']{NPHI1} [u]"),
    ("loop-box-step", CALC1,
     f"[a]({PSI1}) [f], [a']{NPHI1} [u], {NPHI1} [u]", f"[a]({PSI1}) [f]",
     f"{PSI1} [f], [a']{NPHI1} [u]"),
    ("converse-box-step-left", CALC1,
     f"[a]({PSI1}) [f], [a']{NPHI1} [u], <a'>({PHI1}) [u], p [u]", f"[a']{NPHI1} [u]",
     f"{NPHI1} [u], {PHI1} [u]"),
    ("converse-box-step-right", CALC1,
     f"<a'>({PHI1}) [u], p [u], [a']{NPHI1} [u]", f"[a']{NPHI1} [u]",
     f"{PHI1} [u], {NPHI1} [u]"),
    ("diamond-loop-box-step", CALC2,
     f"[a]~p [f], {DPHI2} [f], {PHI2} !~> {DPHI2}, {DPHI2} ~> {PHI2}", "[a]~p [f]",
     f"~p [f], {CPHI2} [f], {CPHI2} !~> {CPHI2}, {CPHI2} ~> {CPHI2}"),
]


def lasso_cases():
    """Hand-built plays ``(name, calc, prefix, cycle, prover_wins)``; the cycle repeats forever."""
    from focusmu.calculus import RuleInstance, bits

    calc = Calculus(negation_closed_context(["nu x.[a]x", "nu x. x", "p"]))

    def one(text):
        return next(bits(calc.parse(text)))

    nb = "nu x.[a]x"
    box_u, box_f = one(f"[a]({nb}) [u]"), one(f"[a]({nb}) [f]")
    act = calc.ctx[box_u >> 1].action
    g_u, g_f = calc.parse(f"{nb} [u]"), calc.parse(f"{nb} [f]")
    unf_u = calc.derive(g_u, "R_nu", one(f"{nb} [u]"))[0][0]
    unf_f = calc.derive(g_f, "R_nu", one(f"{nb} [f]"))[0][0]
    nu_u = RuleInstance(g_u, "R_nu", (unf_u,), one(f"{nb} [u]"))
    nu_f = RuleInstance(g_f, "R_nu", (unf_f,), one(f"{nb} [f]"))
    step_u = RuleInstance(unf_u, "R_box", (calc.jump(unf_u, box_u),), box_u, act)
    step_f = RuleInstance(unf_f, "R_box", (calc.jump(unf_f, box_f),), box_f, act)
    focus = RuleInstance(g_u, "F", (g_f,))
    top = calc.parse("nu x. x [f]")
    top_loop = calc.derive(top, "R_nu", one("nu x. x [f]"))[-1][0]
    spin = RuleInstance(top_loop, "R_nu", (top_loop,), one("nu x. x [f]"))
    cut_f = RuleInstance(g_f, "cut", (g_f | calc.parse("p [u]"), g_f | calc.parse("~p [u]")), calc.ctx.idx("p"))
    return [
        ("focused-with-modal-steps", calc, [], [nu_f, step_f], True),
        ("focused-without-modal-steps", calc, [], [spin], False),
        ("unfocused-with-modal-steps", calc, [], [nu_u, step_u], False),
        ("focus-lost-once-per-round", calc, [], [focus, nu_f, step_u], False),
        ("unfocused-prefix-then-focused", calc, [focus, nu_u], [nu_f, step_f], True),
        ("focused-cut-and-modal", calc, [step_u], [cut_f, nu_f, step_f], True),
    ]


def lasso_winner(calc, prefix, cycle) -> int:
    """Winner of the play: sequent positions (priority 0) alternate with instance positions."""
    from focusmu.paritygames import ParityGame, solve
    from focusmu.search import instance_priority

    play = list(prefix) + list(cycle)
    n = 2 * len(play)
    back = 2 * len(prefix)
    owner, prio, edges = [], [], []
    for k, inst in enumerate(play):
        nxt = 2 * k + 2 if 2 * k + 2 < n else back
        owner += [0, 1]
        prio += [0, instance_priority(calc, inst)]
        edges += [[2 * k + 1], [nxt]]
    return solve(ParityGame(owner, prio, edges)).winner[0]
