"""Command-line harness: training runs, step-size bounds, algebra one-shots.

Exit codes: 0 on completion, 2 when a training run diverges, 1 on usage or
input errors.  All randomness derives from --seed, so identical invocations
produce byte-identical CSV traces.
"""

from __future__ import annotations

import argparse
import sys

from .activations import ACTIVATIONS
from .algebra import Signature, format_multivector, parse_multivector
from .experiments import SIGNAL_KINDS, SignalSpec, emit_csv, run_training
from .filtering import FilterConfig, load_state, mu_bound, net_input, window_energy
from .geometry import dual, left_contraction, outer_product, right_contraction


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; code 2 is reserved for diverged runs
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperfir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    train = sub.add_parser("train", help="run a training experiment and write a CSV trace")
    train.add_argument("--p", type=int, default=0, help="basis vectors squaring to +1")
    train.add_argument("--q", type=int, default=2, help="basis vectors squaring to -1")
    train.add_argument("--taps", type=int, default=4, help="filter length L")
    train.add_argument("--activation", choices=sorted(ACTIVATIONS), default="tanh")
    train.add_argument("--algo", choices=("shafa", "aashafa"), default="shafa")
    train.add_argument("--mu", type=float, default=None, help="fixed step size (overrides auto mode)")
    train.add_argument("--mu-auto-frac", type=float, default=0.1,
                       help="step size as a fraction of the per-step bound")
    train.add_argument("--rho", type=float, default=0.01, help="amplitude learning rate (aashafa)")
    train.add_argument("--steps", type=int, default=5000, help="number of training steps")
    train.add_argument("--signal", choices=SIGNAL_KINDS, default="teacher")
    train.add_argument("--scale", type=float, default=1.0, help="signal amplitude multiplier")
    train.add_argument("--noise", type=float, default=0.0, help="additive noise std")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True, help="CSV output path")

    bound = sub.add_parser("bound", help="print the step-size bound for a state and window")
    bound.add_argument("--state", required=True, help="state snapshot file")
    bound.add_argument("window", nargs="+", help="L window samples as 'p,q:[...]', most recent first")

    algebra = sub.add_parser("algebra", help="evaluate one algebra operation on multivector literals")
    algebra.add_argument("--op", required=True,
                         choices=("product", "outer", "left", "right", "scalar",
                                  "involution", "reverse", "dual", "modulus"))
    algebra.add_argument("operands", nargs="+", help="multivector literals 'p,q:[...]'")

    return parser


def _cmd_train(args) -> int:
    config = FilterConfig(
        sig=Signature(args.p, args.q),
        taps=args.taps,
        activation=args.activation,
        mu=args.mu,
        mu_auto_frac=None if args.mu is not None else args.mu_auto_frac,
        rho=args.rho,
        adaptive_amplitude=args.algo == "aashafa",
        seed=args.seed + 1,
    )
    spec = SignalSpec(
        kind=args.signal,
        length=args.steps + args.taps,
        scale=args.scale,
        noise_std=args.noise,
        seed=args.seed,
        teacher_activation=args.activation,
    )
    report = run_training(config, spec, algo=args.algo)
    emit_csv(report, args.out)
    summary = report.summary
    print(f"rows: {len(report.rows)}")
    print(f"final_mse: {summary.final_mse:.17g}")
    print(f"steps_to_threshold: {summary.steps_to_threshold}")
    print(f"max_lambda_ratio: {summary.max_lambda_ratio:.17g}")
    print(f"diverged: {str(summary.diverged).lower()}")
    return 2 if summary.diverged else 0


def _cmd_bound(args) -> int:
    state, activation_name = load_state(args.state)
    phi = ACTIVATIONS[activation_name]
    window = tuple(parse_multivector(text) for text in args.window)
    if len(window) != state.taps:
        raise ValueError(f"state has {state.taps} taps but {len(window)} window samples given")
    s = net_input(state.weights, window)
    value = mu_bound(window, s, phi, state.amplitudes)
    xx = window_energy(window)
    print(f"mu_bound: {value:.17g}")
    print(f"xx_scalar: {float(xx.coeffs[0]):.17g}")
    print(f"xx_modulus: {xx.modulus():.17g}")
    return 0


def _cmd_algebra(args) -> int:
    operands = [parse_multivector(text) for text in args.operands]
    binary = {"product": lambda a, b: a * b, "outer": outer_product,
              "left": left_contraction, "right": right_contraction}
    if args.op in binary:
        if len(operands) != 2:
            raise ValueError(f"--op {args.op} needs exactly two operands")
        print(format_multivector(binary[args.op](*operands)))
    elif args.op == "scalar":
        if len(operands) != 2:
            raise ValueError("--op scalar needs exactly two operands")
        print(repr(operands[0].scalar_product(operands[1])))
    else:
        if len(operands) != 1:
            raise ValueError(f"--op {args.op} needs exactly one operand")
        m = operands[0]
        if args.op == "involution":
            print(format_multivector(m.involution()))
        elif args.op == "reverse":
            print(format_multivector(m.reverse()))
        elif args.op == "dual":
            print(format_multivector(dual(m)))
        else:
            print(repr(m.modulus()))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "bound":
            return _cmd_bound(args)
        return _cmd_algebra(args)
    except (ValueError, OSError) as exc:
        print(f"hyperfir: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
