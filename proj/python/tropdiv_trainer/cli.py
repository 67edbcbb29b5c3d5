"""tropdiv-trainer train-mnist | train-head | export"""

import argparse
import json
import sys

from . import formats, train


def main(argv=None):
    ap = argparse.ArgumentParser(prog="tropdiv-trainer")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("train-mnist", help="train the 100-unit reference net and export a bundle")
    m.add_argument("--out-dir", required=True)
    m.add_argument("--epochs", type=int, default=10)
    m.add_argument("--hidden", type=int, default=100)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--data-dir", default="data/mnist", help="torchvision MNIST root (not downloaded)")
    m.add_argument("--synthetic", action="store_true", help="generated data instead of MNIST")
    m.add_argument("--train-rows", type=int, default=1000, help="training rows written to CSV")
    m.add_argument("--test-rows", type=int, default=2000, help="test rows written to CSV")

    h = sub.add_parser("train-head", help="train the head network on exported features")
    h.add_argument("--features", required=True)
    h.add_argument("--labels", required=True)
    h.add_argument("--out", required=True)
    h.add_argument("--units", type=int, default=100)
    h.add_argument("--classes", type=int, default=None)
    h.add_argument("--epochs", type=int, default=20)
    h.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("export", help="rewrite a model.pt checkpoint as network JSON")
    e.add_argument("checkpoint")
    e.add_argument("--out", required=True)

    args = ap.parse_args(argv)
    try:
        if args.command == "train-mnist":
            cfg = train.MnistConfig(
                out_dir=args.out_dir, epochs=args.epochs, hidden=args.hidden, seed=args.seed,
                synthetic=args.synthetic, data_dir=args.data_dir, train_rows=args.train_rows,
                test_rows=args.test_rows,
            )
            print(json.dumps(train.train_mnist(cfg), indent=2))
        elif args.command == "train-head":
            feats = formats.read_csv(args.features)
            labels = formats.read_labels(args.labels)
            layers = train.train_head(feats, labels, args.units, args.classes, args.epochs, args.seed)
            formats.write_network(args.out, layers, feats.shape[1])
            print(json.dumps({"params": formats.count_params(layers), "inputs": int(feats.shape[1])}))
        else:
            layers = train.export_checkpoint(args.checkpoint, args.out)
            print(json.dumps({"params": formats.count_params(layers)}))
    except (OSError, ValueError) as err:
        print(json.dumps({"error": str(err)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
