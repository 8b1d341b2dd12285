"""Training loop and its supporting machinery.

Frame-level stratified 90/10 split, inverse-frequency class weights,
a one-cycle learning-rate schedule and mini-batch Adam on the weighted
negative log-likelihood. The best checkpoint is picked by eval macro-F.
"""

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from . import evaluation
from .errors import ChecksumMismatch, ClassTooSmall, NoLabeledData, NonFiniteLoss
from .model import LOSS_EPS, ModelConfig, init_params, window_tensors


@dataclass(frozen=True)
class OneCycleConfig:
    start_div: float = 25.0
    final_div: float = 10000.0
    warm_fraction: float = 0.3


@dataclass(frozen=True)
class AdamConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    eval_fraction: float = 0.10
    seed: int = 0
    max_lr: float = 0.001
    epochs: int = 10
    batch_size: int = 32
    one_cycle: OneCycleConfig = field(default_factory=OneCycleConfig)
    adam: AdamConfig = field(default_factory=AdamConfig)

    def __post_init__(self):
        if not 0.0 < self.eval_fraction < 1.0:
            raise ValueError(f"eval_fraction must be in (0, 1), got {self.eval_fraction}")
        if self.max_lr <= 0:
            raise ValueError(f"max_lr must be positive, got {self.max_lr}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "one_cycle" in d:
            d["one_cycle"] = OneCycleConfig(**d["one_cycle"])
        if "adam" in d:
            d["adam"] = AdamConfig(**d["adam"])
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    eval_loss: list = field(default_factory=list)
    eval_macro_f: list = field(default_factory=list)
    lr_trace: list = field(default_factory=list)


def history_to_csv(history):
    lines = ["epoch,train_loss,eval_loss,macro_F"]
    rows = zip(history.train_loss, history.eval_loss, history.eval_macro_f)
    for epoch, (tl, el, mf) in enumerate(rows):
        lines.append(f"{epoch},{tl},{el},{mf}")
    return "\n".join(lines) + "\n"


def stratified_split(samples, fraction, seed):
    """Per class c: eval takes round(fraction * n_c) samples (at least 1).

    Shuffling is keyed by `seed`; the returned (train, eval) lists are a
    disjoint partition of the input.
    """
    by_class = {}
    for i, sample in enumerate(samples):
        if sample.gold is None:
            raise NoLabeledData(f"sample {i} has no gold label")
        by_class.setdefault(sample.gold.id, []).append(i)

    rng = np.random.default_rng(seed)
    train_idx, eval_idx = [], []
    for label_id in sorted(by_class):
        idx = by_class[label_id]
        if len(idx) < 2:
            raise ClassTooSmall(
                f"class {label_id} has {len(idx)} sample(s); need at least 2"
            )
        perm = rng.permutation(len(idx))
        k = max(1, int(math.floor(fraction * len(idx) + 0.5)))
        eval_idx.extend(idx[p] for p in perm[:k])
        train_idx.extend(idx[p] for p in perm[k:])
    train_idx.sort()
    eval_idx.sort()
    return [samples[i] for i in train_idx], [samples[i] for i in eval_idx]


def compute_class_weights(counts):
    """w_c = T / (K * n_c) over the K non-empty classes; empty classes get 0."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        raise NoLabeledData("all class counts are zero")
    k = int(np.count_nonzero(counts))
    weights = np.zeros_like(counts)
    nonzero = counts > 0
    weights[nonzero] = total / (k * counts[nonzero])
    return weights


def one_cycle_lr(step, total_steps, cfg):
    """Cosine ramp from max_lr/start_div to max_lr over the first
    warm_fraction of steps, then cosine anneal to max_lr/final_div.
    Peak is exactly max_lr."""
    if not 0 <= step < total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps})")
    oc = cfg.one_cycle
    peak = cfg.max_lr
    if total_steps == 1:
        return peak
    warm = min(round(oc.warm_fraction * total_steps), total_steps - 1)
    if step < warm:
        start = peak / oc.start_div
        return start + (peak - start) * 0.5 * (1 - math.cos(math.pi * step / warm))
    if step == warm:
        return peak
    final = peak / oc.final_div
    if step == total_steps - 1:
        return final
    span = total_steps - 1 - warm
    return peak + (final - peak) * 0.5 * (1 - math.cos(math.pi * (step - warm) / span))


def _batch_loss(module, windows, weights_t, config):
    text, audio = window_tensors(config, windows, dtype=next(module.parameters()).dtype)
    golds = torch.tensor([w.gold.id for w in windows], dtype=torch.long)
    probs = module(text, audio)
    p_gold = probs.gather(1, golds.unsqueeze(1)).squeeze(1)
    loss = (-weights_t[golds] * torch.log(p_gold + LOSS_EPS)).mean()
    return loss, probs


def _evaluate(module, eval_set, weights_t, config, batch_size):
    module.eval()
    losses, preds, golds = [], [], []
    with torch.no_grad():
        for i in range(0, len(eval_set), batch_size):
            batch = eval_set[i : i + batch_size]
            loss, probs = _batch_loss(module, batch, weights_t, config)
            losses.append(float(loss) * len(batch))
            preds.extend(int(j) for j in probs.argmax(dim=1))
            golds.extend(w.gold.id for w in batch)
    cm = evaluation.confusion(preds, golds, n_classes=config.n_classes)
    report = evaluation.per_class_metrics(cm)
    return sum(losses) / len(eval_set), report.macro_f


def train(train_set, eval_set, model_cfg, train_cfg):
    """Mini-batch Adam over weighted NLL with the one-cycle schedule.

    Evaluates after every epoch; returns the parameters of the best
    eval-macro-F epoch together with the full history. Fully reproducible
    for a fixed seed.
    """
    if not train_set:
        raise NoLabeledData("empty training set")
    for w in train_set + eval_set:
        if w.gold is None:
            raise NoLabeledData("training windows must carry gold labels")
    # Gradients decaying along the long audio sequences reach float32
    # denormal range, which stalls CPU backward by >10x; flush them to zero
    # for the duration of the loop (the mode is process-wide).
    torch.set_flush_denormal(True)
    try:
        return _train_loop(train_set, eval_set, model_cfg, train_cfg)
    finally:
        torch.set_flush_denormal(False)


def _train_loop(train_set, eval_set, model_cfg, train_cfg):

    params = init_params(model_cfg, train_cfg.seed)
    history = TrainHistory()
    if train_cfg.epochs == 0:
        return params, history

    counts = np.zeros(model_cfg.n_classes)
    for w in train_set:
        counts[w.gold.id] += 1
    weights_t = torch.tensor(compute_class_weights(counts), dtype=torch.float32)

    module = params.module
    n = len(train_set)
    steps_per_epoch = math.ceil(n / train_cfg.batch_size)
    total_steps = train_cfg.epochs * steps_per_epoch
    opt = torch.optim.Adam(
        module.parameters(),
        lr=train_cfg.max_lr,
        betas=(train_cfg.adam.beta1, train_cfg.adam.beta2),
        eps=train_cfg.adam.eps,
    )
    rng = np.random.default_rng(train_cfg.seed)
    torch.manual_seed(train_cfg.seed)

    best_state = copy.deepcopy(module.state_dict())
    best_f, best_epoch = -1.0, -1
    step = 0
    for epoch in range(train_cfg.epochs):
        module.train()
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for b in range(steps_per_epoch):
            batch = [train_set[i] for i in perm[b * train_cfg.batch_size : (b + 1) * train_cfg.batch_size]]
            lr = one_cycle_lr(step, total_steps, train_cfg)
            for group in opt.param_groups:
                group["lr"] = lr
            loss, _ = _batch_loss(module, batch, weights_t, model_cfg)
            if not torch.isfinite(loss):
                raise NonFiniteLoss(f"loss {float(loss)} at step {step} (epoch {epoch})")
            opt.zero_grad()
            loss.backward()
            opt.step()
            history.lr_trace.append(lr)
            epoch_loss += float(loss.detach()) * len(batch)
            step += 1
        history.train_loss.append(epoch_loss / n)
        eval_loss, macro_f = _evaluate(module, eval_set, weights_t, model_cfg, train_cfg.batch_size)
        history.eval_loss.append(eval_loss)
        history.eval_macro_f.append(macro_f)
        if macro_f > best_f:
            best_f, best_epoch = macro_f, epoch
            best_state = copy.deepcopy(module.state_dict())

    module.load_state_dict(best_state)
    params.epoch = best_epoch
    params.metrics = {"eval_macro_f": best_f, "eval_loss": history.eval_loss[best_epoch]}
    return params, history


# --- checkpoints -------------------------------------------------------------

_CKPT_FORMAT = "lectseg-checkpoint-v1"


def save_checkpoint(params, history, path):
    """JSON header line + parameter blob; SHA-256 of the blob in the header."""
    blob = params.to_blob()
    header = {
        "format": _CKPT_FORMAT,
        "config": params.config.to_dict(),
        "seed": params.seed,
        "epoch": params.epoch,
        "metrics": params.metrics,
        "sha256": hashlib.sha256(blob).hexdigest(),
        "params": params.parameter_names(),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8"))
        fh.write(b"\n")
        fh.write(blob)
    if history is not None:
        Path(path).with_suffix(".history.csv").write_text(history_to_csv(history))


def load_checkpoint(path):
    """Rebuild ModelParams; raises ChecksumMismatch on any blob corruption."""
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    header = json.loads(raw[:nl].decode("utf-8"))
    if header.get("format") != _CKPT_FORMAT:
        raise ChecksumMismatch(f"{path}: not a checkpoint file")
    blob = raw[nl + 1 :]
    if hashlib.sha256(blob).hexdigest() != header["sha256"]:
        raise ChecksumMismatch(f"{path}: parameter blob does not match header SHA-256")
    config = ModelConfig.from_dict(header["config"])
    params = init_params(config, header["seed"])
    params.load_blob(blob)
    params.epoch = header.get("epoch", -1)
    params.metrics = header.get("metrics", {})
    return params
