"""Regenerate the .cfm / .nfa / .trace fixtures under data/."""

from pathlib import Path

from mbsync.automata.nfa import parse_nfa, render_nfa
from mbsync.decide.bench import gen_benchmark, nonsim_gadget, nonsync_gadget
from mbsync.model import Cfm, cfm_from_traces, make_cfm, parse_trace, render_cfm, render_trace

DATA = Path(__file__).resolve().parent.parent / "data"

TRACES = {
    # mb-viable and p2p-synchronizable, but the early unmatched send blocks any mailbox decomposition
    "late_unmatched_send": "p1!p3(a) p2!p1(b) p1?p2(b) p1!p2(c) p2?p1(c) p3!p2(d) p3?p1(a)",
    # one matched exchange followed by an unmatched reply
    "three_process_chain": "p1!p2(m1) p2!p3(m2) p3?p2(m2) p3!p2(m3) p2?p1(m1)",
    # two atomic parts ordered only through p2's mailbox
    "two_components": "p2!p1(m1) p1!p2(m2) p1?p2(m1) p2?p1(m2) p3!p2(m3)",
    # synchronizable under a per-channel product, not under the mailbox product
    "weakly_synchronous": "p2!p1(m2) p2!p3(m3) p3?p2(m3) p3!p2(m4) p2?p3(m4) p1!p2(m1) p1?p2(m2)",
    # atomic and not synchronizable; r = p2?p1(m4) closes the cycle
    "atomic_witness": "p3!p2(m1) p1!p3(m2) p3?p1(m2) p3!p4(m3) p4?p3(m3) p1!p2(m4) p2!p4(m5) p2?p1(m4)",
    # same shape with message m2 reversed; appending the last receive breaks mailbox order
    "atomic_witness_reversed": "p3!p2(m1) p3!p1(m2) p1?p3(m2) p3!p4(m3) p4?p3(m3) p1!p2(m4) p2!p4(m5) p2?p1(m4)",
    # one exchange whose ms-sequence admits the labeling 2,3,0,1 from p1's last to first receive
    "labeled_exchange": "p2!p3(m2) p2!p1(m1) p2!p1(m4) p3!p2(m3) p1?p2(m1) p1?p2(m4) p3?p2(m2) p2?p3(m3)",
}

NFAS = {
    "ends_in_b": "nfa ends_in_b\ninit e0\nfinal e1\ne0 -> e0 : a\ne0 -> e0 : b\ne0 -> e1 : b\n",
    "even_length": "nfa even_length\ninit o0\nfinal o0\no0 -> o1 : a\no0 -> o1 : b\no1 -> o0 : a\no1 -> o0 : b\n",
    "only_a": "nfa only_a\ninit z0\nfinal z0\nz0 -> z0 : a\n",
}


# Properties over the actions of a sender p and two receivers U, V, with
# every letter written as one character: sends a b c d = p!U(0) p!U(1)
# p!V(0) p!V(1), unmatched sends A B C D, receives u v = U?p(0) U?p(1) and
# x y = V?p(0) V?p(1).
LETTERS = {
    "a": "p!U(0)", "b": "p!U(1)", "c": "p!V(0)", "d": "p!V(1)",
    "A": "p!!U(0)", "B": "p!!U(1)", "C": "p!!V(0)", "D": "p!!V(1)",
    "u": "U?p(0)", "v": "U?p(1)", "x": "V?p(0)", "y": "V?p(1)",
}
ALL = "".join(LETTERS)
SENDS = "abcdABCD"
RECVS = "uvxy"


def _minus(chars, drop):
    return "".join(ch for ch in chars if ch not in drop)


# name -> (finals, {state: [(letters, target), ...]}); state 0 is initial, missing letters reject
PROPERTIES = {
    "everything": ([0], {0: [(ALL, 0)]}),
    "nothing": ([], {0: []}),
    "all_sends_matched": ([0], {0: [("abcd" + RECVS, 0)]}),
    "at_most_one_send": ([0, 1], {0: [(RECVS, 0), (SENDS, 1)], 1: [(RECVS, 1)]}),
    "even_receives_by_U": ([0], {0: [("uv", 1), (_minus(ALL, "uv"), 0)], 1: [("uv", 0), (_minus(ALL, "uv"), 1)]}),
    "U_zero_never_before_U_one": ([0, 1], {0: [("u", 1), (_minus(ALL, "u"), 0)], 1: [(_minus(ALL, "v"), 1)]}),
    "V_reads_after_send_to_V": ([0, 1], {0: [("cdCD", 1), (_minus(ALL, "cdCDxy"), 0)], 1: [(ALL, 1)]}),
    "ends_with_send": ([0, 1], {0: [(SENDS, 1), (RECVS, 2)], 1: [(SENDS, 1), (RECVS, 2)], 2: [(SENDS, 1), (RECVS, 2)]}),
    "sends_then_receives": ([0, 1], {0: [(SENDS, 0), (RECVS, 1)], 1: [(RECVS, 1)]}),
    "no_two_sends_in_a_row": ([0, 1], {0: [(RECVS, 0), (SENDS, 1)], 1: [(RECVS, 0)]}),
    "lockstep_receives": ([0, 3], {0: [("abcd", 0), ("u", 1), ("v", 2)], 1: [("x", 3)], 2: [("y", 3)], 3: [("u", 1), ("v", 2)]}),
    "not_lockstep_receives": (
        [1, 2, 4],
        {
            0: [("abcd", 0), ("u", 1), ("v", 2), (_minus(ALL, "abcduv"), 4)],
            1: [("x", 3), (_minus(ALL, "x"), 4)],
            2: [("y", 3), (_minus(ALL, "y"), 4)],
            3: [("u", 1), ("v", 2), (_minus(ALL, "uv"), 4)],
            4: [(ALL, 4)],
        },
    ),
    "U_zero_then_V_zero_adjacent": ([2], {0: [("u", 1), (_minus(ALL, "u"), 0)], 1: [("x", 2), ("u", 1), (_minus(ALL, "ux"), 0)], 2: [(ALL, 2)]}),
    "first_receive_by_U": ([1], {0: [(SENDS, 0), ("uv", 1)], 1: [(ALL, 1)]}),
    "last_receive_by_V": ([1], {0: [("xy", 1), ("uv", 0), (SENDS, 0)], 1: [("xy", 1), ("uv", 0), (SENDS, 1)]}),
    "U_reads_before_V_reads": ([0, 1], {0: [("xy", 1), (_minus(ALL, "xy"), 0)], 1: [(_minus(ALL, "uv"), 1)]}),
    "receivers_alternate": ([0, 1], {0: [(SENDS, 0), ("uv", 1)], 1: [(SENDS, 1), ("xy", 0)]}),
    "no_V_read_right_after_U_read": ([0, 1], {0: [("uv", 1), (_minus(ALL, "uv"), 0)], 1: [("uv", 1), (SENDS, 0)]}),
    "even_U_reads_before_first_V_read": ([0, 2], {0: [(SENDS, 0), ("uv", 1), ("xy", 2)], 1: [(SENDS, 1), ("uv", 0)], 2: [(ALL, 2)]}),
    "V_one_before_U_one": ([1], {0: [("y", 1), (_minus(ALL, "vy"), 0)], 1: [(ALL, 1)]}),
}


def property_text(name: str) -> str:
    finals, delta = PROPERTIES[name]
    lines = [f"nfa {name}", "init s0", "final " + " ".join(f"s{f}" for f in finals)]
    for src, moves in delta.items():
        for chars, dst in moves:
            for ch in chars:
                lines.append(f"s{src} -> s{dst} : {LETTERS[ch]}")
    return "\n".join(lines) + "\n"


def _seq(text):
    return parse_trace("\n".join(text.split()))


def cfms():
    out = {}
    for name in ("late_unmatched_send", "three_process_chain", "weakly_synchronous"):
        out[name] = cfm_from_traces(name, [_seq(TRACES[name])])
    out["nonsync_gadget"] = Cfm("nonsync_gadget", tuple(nonsync_gadget()))
    out["nonsim_gadget"] = Cfm("nonsim_gadget", tuple(nonsim_gadget()))
    out["crossing_round"] = make_cfm(
        "crossing_round",
        {"p": ("s0", [("s0", "p!q(a)", "s1"), ("s1", "p?q(b)", "s2")]), "q": ("s0", [("s0", "q!p(b)", "s1"), ("s1", "q?p(a)", "s2")])},
    )
    out["crossing_loop"] = make_cfm(
        "crossing_loop",
        {"p": ("s", [("s", "p!q(a)", "s"), ("s", "p?q(b)", "s")]), "q": ("s", [("s", "q!p(b)", "s"), ("s", "q?p(a)", "s")])},
    )
    out["ping_pong"] = make_cfm(
        "ping_pong",
        {"p": ("s0", [("s0", "p!q(ping)", "s1"), ("s1", "p?q(pong)", "s0")]), "q": ("s0", [("s0", "q?p(ping)", "s1"), ("s1", "q!p(pong)", "s0")])},
    )
    pair = [parse_nfa(NFAS["ends_in_b"]), parse_nfa(NFAS["even_length"])]
    out["intersection_pair"] = gen_benchmark(pair, name="intersection_pair")
    out["intersection_pair_nonsync"] = gen_benchmark(pair, gadget="nonsync", name="intersection_pair_nonsync")
    out["intersection_pair_nonsim"] = gen_benchmark(pair, gadget="nonsim", name="intersection_pair_nonsim")
    empty = [parse_nfa(NFAS["ends_in_b"]), parse_nfa(NFAS["only_a"])]
    out["intersection_empty_nonsync"] = gen_benchmark(empty, gadget="nonsync", name="intersection_empty_nonsync")
    return out


def main():
    for name, text in TRACES.items():
        (DATA / "traces" / f"{name}.trace").write_text(render_trace(_seq(text)))
    for name, text in NFAS.items():
        (DATA / "nfa" / f"{name}.nfa").write_text(render_nfa(parse_nfa(text)))
    for name in PROPERTIES:
        (DATA / "properties" / f"{name}.nfa").write_text(property_text(name))
    for name, cfm in cfms().items():
        (DATA / f"{name}.cfm").write_text(render_cfm(cfm))
    print(f"wrote fixtures to {DATA}")


if __name__ == "__main__":
    main()
