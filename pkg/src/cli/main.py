import argparse
import math
import sys
from pathlib import Path
from typing import Callable, Final, NoReturn, Optional, Sequence

from pydantic import ValidationError

from src.core.enums import (
    AttackKind,
    CollisionPolicy,
    EmbedMode,
    Interpolation,
    ZeroingAnchor,
)
from src.core.exceptions import DataFormatError, PreconditionError
from src.core.models import AttackSpec, BitPlaneLayout, EmbedConfig, SecretKey
from src.core.utils import psnr, similarity
from src.infrastructure.config import load_settings
from src.infrastructure.corpus import load_carrier, load_watermark, write_corpus
from src.infrastructure.files.artifact_store import NetpbmArtifactStore
from src.infrastructure.files.keyfile import load_grid, load_key, save_key
from src.infrastructure.files.netpbm import load_pgm, save_pbm, save_pgm
from src.infrastructure.files.report_writer import (
    CsvReportWriter,
    MarkdownReportWriter,
)
from src.infrastructure.logging.logger import set_global_level, setup_logger
from src.services.attack_service import apply_attack
from src.services.evaluation_service import EvaluationService
from src.services.exceptions import MissingOriginalError
from src.services.watermark_service import DEFAULT_THRESHOLD, authenticate, embed
from src.services.watermark_service import extract as extract_watermark

logger = setup_logger(__name__)

EXIT_OK: Final[int] = 0
EXIT_USAGE: Final[int] = 1
EXIT_DATA: Final[int] = 2
EXIT_PRECONDITION: Final[int] = 3
EXIT_TAMPERED: Final[int] = 4

ATTACK_PARAMETERS: Final[dict[AttackKind, str]] = {
    AttackKind.ZEROING: "size",
    AttackKind.ROTATION: "angle",
    AttackKind.JPEG: "ratio",
    AttackKind.GAUSSIAN: "sigma",
}


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Raises ``UsageError`` instead of exiting, so ``main`` owns exit codes."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _mask(value: str) -> int:
    try:
        mask = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a bit mask") from None
    if not 0 <= mask <= 0xFF:
        raise argparse.ArgumentTypeError(f"mask {value} does not fit in 8 bits")
    return mask


def _dims(value: str) -> tuple[int, int]:
    width, sep, height = value.lower().partition("x")
    if not sep or not width.isdigit() or not height.isdigit():
        raise argparse.ArgumentTypeError(f"expected WxH, got {value!r}")
    if int(width) < 1 or int(height) < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive: {value}")
    return int(width), int(height)


def _workers(value: str) -> int:
    if not value.isdigit() or int(value) < 1:
        raise argparse.ArgumentTypeError(f"workers must be positive, got {value!r}")
    return int(value)


def _same_file(a: Path, b: Path) -> bool:
    return a.resolve() == b.resolve()


def _embed_config(args: argparse.Namespace) -> EmbedConfig:
    return EmbedConfig(
        mode=EmbedMode(args.mode),
        layout=BitPlaneLayout(msc_mask=args.msc_mask, lsc_mask=args.lsc_mask),
        collision_policy=CollisionPolicy(args.policy),
    )


def _format_psnr(value: float) -> str:
    return "psnr=inf" if math.isinf(value) else f"psnr={value:.2f} dB"


def cmd_keygen(args: argparse.Namespace) -> int:
    key = SecretKey(
        mu=args.mu,
        u0=args.u0,
        burn_in=args.burn_in,
        mix_iters=args.mix_iters,
        authenticated=args.authenticated,
    )
    save_key(key, args.out)
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    out = Path(args.out)
    for source in (args.carrier, args.watermark):
        if out.exists() and _same_file(out, Path(source)):
            raise UsageError(f"refusing to overwrite input file {source}")
    carrier = load_carrier(args.carrier)
    watermark = load_watermark(args.watermark)
    key = load_key(args.key)
    watermarked = embed(carrier, watermark, key, _embed_config(args))
    save_pgm(watermarked, out)
    print(_format_psnr(psnr(carrier, watermarked)))
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    config = _embed_config(args)
    if config.mode is EmbedMode.NEGATE and args.original is None:
        raise MissingOriginalError("--original is required in negate mode")
    reference = load_watermark(args.reference) if args.reference else None
    dims = args.dims
    if dims is None:
        if reference is None:
            raise UsageError("give --dims or a --reference watermark")
        dims = (reference.width, reference.height)

    watermarked = load_pgm(args.image)
    original = load_carrier(args.original) if args.original else None
    extracted = extract_watermark(
        watermarked, load_key(args.key), config, dims, original=original
    )
    save_pbm(extracted, args.out)
    if reference is not None:
        print(f"similarity={similarity(extracted, reference).percentage:.2f}%")
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    kind = AttackKind(args.attack)
    flag = ATTACK_PARAMETERS[kind]
    parameter = getattr(args, flag)
    if parameter is None:
        raise UsageError(f"--attack {kind.value} needs --{flag}")
    out = Path(args.out)
    if out.exists() and _same_file(out, Path(args.image)):
        raise UsageError(f"refusing to overwrite input file {args.image}")
    spec = AttackSpec(
        kind=kind,
        parameter=parameter,
        seed=args.seed,
        anchor=ZeroingAnchor(args.anchor),
        interpolation=Interpolation(args.interpolation),
    )
    attacked = apply_attack(load_pgm(args.image), spec)
    save_pgm(attacked, out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    settings = load_settings()
    grid = load_grid(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    keep = args.keep_artifacts or settings.keep_artifacts
    store = NetpbmArtifactStore(out_dir / "artifacts") if keep else None
    service = EvaluationService(
        report_writers=[
            CsvReportWriter(out_dir / "report.csv"),
            MarkdownReportWriter(out_dir / "report.md"),
        ],
        artifact_store=store,
        workers=args.workers or settings.workers,
    )
    rows = service.run(
        grid, load_carrier(grid.carrier), load_watermark(grid.watermark)
    )
    print(f"rows={len(rows)} failed={sum(row.failed for row in rows)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = _embed_config(args)
    reference = load_watermark(args.reference) if args.reference else None
    if config.mode is EmbedMode.SUBSTITUTE and reference is None:
        raise UsageError("--reference is required in substitute mode")
    if config.mode is EmbedMode.NEGATE and args.original is None:
        raise MissingOriginalError("--original is required in negate mode")
    if args.dims is None and reference is None:
        raise UsageError("give --dims or a --reference watermark")
    verdict = authenticate(
        load_pgm(args.image),
        reference,
        load_key(args.key),
        config,
        dims=args.dims,
        original=load_carrier(args.original) if args.original else None,
        threshold=args.threshold,
    )
    status = "authentic" if verdict.authentic else "tampered"
    print(f"similarity={verdict.report.percentage:.2f}% {status}")
    return EXIT_OK if verdict.authentic else EXIT_TAMPERED


def cmd_corpus(args: argparse.Namespace) -> int:
    carrier_path, logo_path = write_corpus(args.out_dir)
    print(carrier_path)
    print(logo_path)
    return EXIT_OK


def _add_embedding_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in EmbedMode],
        default=EmbedMode.SUBSTITUTE.value,
    )
    parser.add_argument(
        "--policy",
        choices=[policy.value for policy in CollisionPolicy],
        default=CollisionPolicy.PROBE.value,
    )
    parser.add_argument("--msc-mask", type=_mask, default=0xF0)
    parser.add_argument("--lsc-mask", type=_mask, default=0x0E)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument(
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS,
        help="log at DEBUG level",
    )

    parser = ArgumentParser(
        prog="chaosmark",
        description="Chaotic-iterations watermarking of grayscale images",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    keygen = commands.add_parser("keygen", parents=[common], help="write a key file")
    keygen.add_argument("--mu", type=float, required=True)
    keygen.add_argument("--u0", type=float, required=True)
    keygen.add_argument("--burn-in", type=int, default=100)
    keygen.add_argument("--mix-iters", type=int, default=None)
    keygen.add_argument("--authenticated", action="store_true")
    keygen.add_argument("--out", required=True)
    keygen.set_defaults(handler=cmd_keygen)

    embed_cmd = commands.add_parser(
        "embed", parents=[common], help="hide a PBM watermark in a PGM carrier"
    )
    embed_cmd.add_argument("--carrier", required=True)
    embed_cmd.add_argument("--watermark", required=True)
    embed_cmd.add_argument("--key", required=True)
    embed_cmd.add_argument("--out", required=True)
    _add_embedding_options(embed_cmd)
    embed_cmd.set_defaults(handler=cmd_embed)

    extract_cmd = commands.add_parser(
        "extract", parents=[common], help="recover a watermark"
    )
    extract_cmd.add_argument("--image", required=True)
    extract_cmd.add_argument("--key", required=True)
    extract_cmd.add_argument("--dims", type=_dims, default=None)
    extract_cmd.add_argument("--original", default=None)
    extract_cmd.add_argument("--reference", default=None)
    extract_cmd.add_argument("--out", required=True)
    _add_embedding_options(extract_cmd)
    extract_cmd.set_defaults(handler=cmd_extract)

    attack = commands.add_parser("attack", parents=[common], help="degrade an image")
    attack.add_argument("--image", required=True)
    attack.add_argument(
        "--attack", choices=[kind.value for kind in AttackKind], required=True
    )
    attack.add_argument("--size", type=float, default=None)
    attack.add_argument("--angle", type=float, default=None)
    attack.add_argument("--ratio", type=float, default=None)
    attack.add_argument("--sigma", type=float, default=None)
    attack.add_argument("--seed", type=int, default=0)
    attack.add_argument(
        "--anchor",
        choices=[anchor.value for anchor in ZeroingAnchor],
        default=ZeroingAnchor.CENTER.value,
    )
    attack.add_argument(
        "--interpolation",
        choices=[mode.value for mode in Interpolation],
        default=Interpolation.BILINEAR.value,
    )
    attack.add_argument("--out", required=True)
    attack.set_defaults(handler=cmd_attack)

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="run an attack grid and write reports"
    )
    evaluate.add_argument("config")
    evaluate.add_argument("--out-dir", default=".")
    evaluate.add_argument("--keep-artifacts", action="store_true")
    evaluate.add_argument("--workers", type=_workers, default=None)
    evaluate.set_defaults(handler=cmd_evaluate)

    verify = commands.add_parser(
        "verify", parents=[common], help="check a watermarked image for tampering"
    )
    verify.add_argument("--image", required=True)
    verify.add_argument("--key", required=True)
    verify.add_argument("--reference", default=None)
    verify.add_argument("--dims", type=_dims, default=None)
    verify.add_argument("--original", default=None)
    verify.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    _add_embedding_options(verify)
    verify.set_defaults(handler=cmd_verify)

    corpus = commands.add_parser(
        "corpus", parents=[common], help="write the synthetic test corpus"
    )
    corpus.add_argument("--out-dir", default=".")
    corpus.set_defaults(handler=cmd_corpus)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            set_global_level("DEBUG")
        handler: Callable[[argparse.Namespace], int] = args.handler
        return handler(args)
    except (UsageError, MissingOriginalError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DataFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:
        logger.error(f"Unexpected failure: {str(e)}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
