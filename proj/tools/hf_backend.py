#!/usr/bin/env python3
# Copyright 2026 The hatemix Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Transformer worker for the hatemix subprocess backend.

Usage: hf_backend.py REQUEST.json

Reads one request written by the C++ subprocess backend and reports progress
on stdout as JSON lines ("eval", "predictions", "log", "error" events).
Checkpoints are written below the request's work_dir and reported by paths
relative to it.

Example backend id:
    subprocess:python3 tools/hf_backend.py
"""

import json
import os
import sys


def emit(event, **fields):
    fields["event"] = event
    sys.stdout.write(json.dumps(fields) + "\n")
    sys.stdout.flush()


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def model_source(uri):
    if uri.startswith("pretrained:"):
        return uri[len("pretrained:"):]
    return uri


def eval_callback(transformers, work_dir):
    class EvalLossReporter(transformers.TrainerCallback):
        def on_evaluate(self, args, state, control, metrics=None, **kwargs):
            if metrics and "eval_loss" in metrics and state.global_step > 0:
                self.pending = (state.global_step, float(metrics["eval_loss"]))

        def on_save(self, args, state, control, **kwargs):
            pending = getattr(self, "pending", None)
            if pending is None or pending[0] != state.global_step:
                return
            uri = os.path.relpath(
                os.path.join(args.output_dir, "checkpoint-%d" % state.global_step), work_dir)
            emit("eval", step=pending[0], eval_loss=pending[1], artifact_uri=uri)
            self.pending = None

    return EvalLossReporter()


def training_args(transformers, cfg, work_dir, steps_per_epoch, **extra):
    # Evaluate every N steps and at each epoch end; saving follows evaluation
    # so that every reported loss has a checkpoint.
    return transformers.TrainingArguments(
        output_dir=os.path.join(work_dir, "checkpoints"),
        num_train_epochs=cfg["epochs"],
        per_device_train_batch_size=cfg["batch_size"],
        per_device_eval_batch_size=cfg["batch_size"],
        learning_rate=cfg["learning_rate"],
        eval_strategy="steps",
        eval_steps=min(cfg["eval_every_steps"], max(1, steps_per_epoch)),
        save_strategy="steps",
        save_steps=min(cfg["eval_every_steps"], max(1, steps_per_epoch)),
        seed=cfg["seed"] % (2**32),
        report_to=[],
        logging_strategy="no",
        **extra)


def retrain_mlm(req):
    import datasets
    import transformers

    cfg = req["config"]
    work_dir = req["work_dir"]
    source = model_source(req["base_model"])
    texts = [json.loads(line) for line in open(os.path.join(work_dir, req["texts_file"]),
                                               encoding="utf-8") if line.strip()]
    tokenizer = transformers.AutoTokenizer.from_pretrained(source)
    model = transformers.AutoModelForMaskedLM.from_pretrained(source)
    data = datasets.Dataset.from_dict({"text": texts}).train_test_split(
        test_size=0.1, seed=cfg["seed"] % (2**32))
    data = data.map(lambda b: tokenizer(b["text"], truncation=True,
                                        max_length=cfg["max_seq_length"]),
                    batched=True, remove_columns=["text"])
    collator = transformers.DataCollatorForLanguageModeling(
        tokenizer, mlm_probability=cfg["mlm_probability"])
    steps = -(-len(data["train"]) // cfg["batch_size"])
    trainer = transformers.Trainer(
        model=model,
        args=training_args(transformers, cfg, work_dir, steps),
        train_dataset=data["train"],
        eval_dataset=data["test"],
        data_collator=collator,
        callbacks=[eval_callback(transformers, work_dir)])
    trainer.train()


def finetune(req):
    import datasets
    import transformers

    cfg = req["config"]
    work_dir = req["work_dir"]
    labels = req["labels"]
    index = {label: i for i, label in enumerate(labels)}
    source = model_source(req["encoder"])
    tokenizer = transformers.AutoTokenizer.from_pretrained(source)
    model = transformers.AutoModelForSequenceClassification.from_pretrained(
        source, num_labels=len(labels))

    def load(name):
        rows = read_jsonl(os.path.join(work_dir, req[name]))
        ds = datasets.Dataset.from_dict({
            "text": [r["text"] for r in rows],
            "label": [index[r["label"]] for r in rows]})
        return ds.map(lambda b: tokenizer(b["text"], truncation=True,
                                          max_length=cfg["max_seq_length"]),
                      batched=True, remove_columns=["text"])

    train = load("train_file")
    validation = load("validation_file")
    steps = -(-len(train) // cfg["batch_size"])
    # The Trainer's default optimiser is AdamW.
    args = training_args(transformers, cfg, work_dir, steps,
                         weight_decay=cfg["weight_decay"],
                         adam_beta1=cfg["adam_beta1"],
                         adam_beta2=cfg["adam_beta2"],
                         adam_epsilon=cfg["adam_epsilon"])
    trainer = transformers.Trainer(
        model=model, args=args, train_dataset=train, eval_dataset=validation,
        data_collator=transformers.DataCollatorWithPadding(tokenizer),
        callbacks=[eval_callback(transformers, work_dir)])
    trainer.train()
    tokenizer.save_pretrained(os.path.join(work_dir, "checkpoints"))


def predict(req):
    import torch
    import transformers

    source = req["classifier"]
    tokenizer_dir = source if os.path.exists(os.path.join(source, "tokenizer_config.json")) \
        else os.path.dirname(source)
    tokenizer = transformers.AutoTokenizer.from_pretrained(tokenizer_dir)
    model = transformers.AutoModelForSequenceClassification.from_pretrained(source)
    model.eval()
    texts = [json.loads(line) for line in open(os.path.join(req["work_dir"], req["texts_file"]),
                                               encoding="utf-8") if line.strip()]
    out = []
    with torch.no_grad():
        for start in range(0, len(texts), 32):
            batch = tokenizer(texts[start:start + 32], truncation=True, padding=True,
                              max_length=512, return_tensors="pt")
            out.extend(model(**batch).logits.argmax(dim=-1).tolist())
    emit("predictions", indices=out)


def main(argv):
    if len(argv) != 2:
        emit("error", message="usage: hf_backend.py REQUEST.json")
        return 1
    with open(argv[1], encoding="utf-8") as f:
        req = json.load(f)
    ops = {"retrain_mlm": retrain_mlm, "finetune": finetune, "predict": predict}
    op = ops.get(req.get("op"))
    if op is None:
        emit("error", message="unknown op: %r" % req.get("op"))
        return 1
    try:
        op(req)
    except Exception as e:  # reported to the orchestrator as BackendFailure
        emit("error", message="%s: %s" % (type(e).__name__, e))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
