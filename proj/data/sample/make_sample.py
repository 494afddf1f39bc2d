"""Writes the small telecom sample used in the README walkthrough."""
import json
from pathlib import Path

HERE = Path(__file__).parent

CHUNKS = {
    "c-harq": "HARQ combines forward error correction with retransmission. The receiver stores failed "
              "transport blocks in a soft buffer. Retransmissions are soft-combined with the stored data.",
    "c-rrc": "RRC connection setup starts with an RRC Setup Request from the UE. The network answers with "
             "RRC Setup. The UE confirms with RRC Setup Complete.",
    "c-pdcp": "PDCP performs header compression and ciphering. It also provides in-order delivery "
              "after handover.",
    "c-bwp": "A bandwidth part is a contiguous set of resource blocks within a carrier. A UE can be "
             "configured with up to four downlink bandwidth parts.",
    "c-drx": "DRX lets the UE switch off its receiver between paging occasions. The DRX cycle length "
             "trades latency for battery life.",
    "c-ssb": "The SS/PBCH block carries the primary and secondary synchronization signals. It also "
             "carries the physical broadcast channel.",
    "c-amf": "The AMF handles registration and mobility management in the 5G core. Session management "
             "is handled by the SMF.",
    "c-numerology": "NR numerology defines subcarrier spacing as 15 kHz times a power of two. Higher "
                    "numerologies shorten the slot duration.",
}

# id, question, gold chunk, retrieved chunk, answer, ground truth, statements,
# verdicts, human_correct
SAMPLES = [
    ("q01", "What does HARQ combine?", "c-harq", "c-harq",
     "HARQ combines forward error correction with retransmission.",
     "HARQ combines forward error correction with ARQ retransmission.",
     ["HARQ combines forward error correction with retransmission."], [True], True),
    ("q02", "Which message starts RRC connection setup?", "c-rrc", "c-rrc",
     "The UE sends an RRC Setup Request. The network replies with RRC Setup.",
     "The UE starts with an RRC Setup Request.",
     ["The UE sends an RRC Setup Request.", "The network replies with RRC Setup."], [True, True], True),
    ("q03", "What does PDCP do?", "c-pdcp", "c-pdcp",
     "PDCP performs header compression and ciphering.",
     "PDCP performs header compression, ciphering and in-order delivery.",
     ["PDCP performs header compression.", "PDCP performs ciphering."], [True, True], True),
    ("q04", "How many downlink bandwidth parts can a UE have?", "c-bwp", "c-bwp",
     "A UE can be configured with up to four downlink bandwidth parts.",
     "Up to four downlink bandwidth parts.",
     ["A UE can be configured with up to four downlink bandwidth parts."], [True], True),
    ("q05", "What does DRX trade off?", "c-drx", "c-ssb",
     "DRX trades latency for battery life. It is configured by the SS/PBCH block.",
     "The DRX cycle length trades latency for battery life.",
     ["DRX trades latency for battery life.", "DRX is configured by the SS/PBCH block."], [False, False], False),
    ("q06", "Which core function handles registration?", "c-amf", "c-numerology",
     "The SMF handles registration.",
     "The AMF handles registration and mobility management.",
     ["The SMF handles registration."], [False], False),
    ("q07", "What does the SS/PBCH block carry?", "c-ssb", "c-ssb",
     "It carries the synchronization signals and the broadcast channel.",
     "The primary and secondary synchronization signals and the PBCH.",
     ["The SS/PBCH block carries the synchronization signals.",
      "The SS/PBCH block carries the broadcast channel."], [True, True], True),
    ("q08", "How is NR subcarrier spacing defined?", "c-numerology", "c-drx",
     "Subcarrier spacing is 15 kHz times a power of two. It depends on the DRX cycle.",
     "As 15 kHz times a power of two.",
     ["Subcarrier spacing is 15 kHz times a power of two.", "Subcarrier spacing depends on the DRX cycle."],
     [False, False], True),
]


def numbered(items):
    return "\n".join(f"{i + 1}. {s}" for i, s in enumerate(items))


def main():
    dataset, rules, corpus, gold, labels = [], [], [], [], []
    for cid, text in CHUNKS.items():
        corpus.append({"chunk_id": cid, "text": text, "source_doc": "TS-sample"})
    for sid, q, gold_chunk, got, answer, truth, stmts, verdicts, human in SAMPLES:
        context = CHUNKS[got]
        dataset.append({"id": sid, "question": q, "contexts": [context], "generated_answer": answer,
                        "ground_truth": truth, "retrieval_correct": got == gold_chunk})
        gold.append({"question_id": sid, "gold_chunk_id": gold_chunk})
        labels.append({"id": sid, "human_correct": human})
        verdict_lines = [f"statement: {s}\nExplanation: {'stated in' if v else 'not found in'} the context.\n"
                         f"Verdict: {'Yes' if v else 'No'}" for s, v in zip(stmts, verdicts)]
        final = " ".join("Yes." if v else "No." for v in verdicts)
        relevant = [s for s in context.split(". ") if any(w.lower() in s.lower() for w in q.split()[-2:])]
        tp = [s for s, v in zip(stmts, verdicts) if v and human]
        fp = [s for s, v in zip(stmts, verdicts) if not (v and human)]
        fn = [] if human else [truth]
        for metric in ("faithfulness",):
            rules.append({"match": {"request_tag_prefix": f"{metric}:{sid}:statements"}, "response": numbered(stmts)})
            rules.append({"match": {"request_tag_prefix": f"{metric}:{sid}:verdicts"},
                          "response": "\n\n".join(verdict_lines) + "\nFinal verdicts in order: " + final})
        rules.append({"match": {"request_tag_prefix": f"answer_relevance:{sid}:question"},
                      "response": q.replace("What", "Which") if q.startswith("What") else q})
        rules.append({"match": {"request_tag_prefix": f"context_relevance:{sid}:extraction"},
                      "response": "\n".join(relevant) if relevant and got == gold_chunk
                      else "Insufficient Information"})
        for metric in ("factual_correctness", "answer_correctness"):
            rules.append({"match": {"request_tag_prefix": f"{metric}:{sid}:classification"},
                          "response": json.dumps({"TP": tp, "FP": fp, "FN": fn})})

    def dump(name, rows):
        with open(HERE / name, "w") as f:
            for r in rows:
                f.write(json.dumps(r) + "\n")

    dump("dataset.jsonl", dataset)
    dump("corpus.jsonl", corpus)
    dump("gold.jsonl", gold)
    dump("labels.jsonl", labels)
    dump("questions.jsonl", [{"id": d["id"], "question": d["question"], "contexts": []} for d in dataset])
    with open(HERE / "mock.json", "w") as f:
        json.dump({"rules": rules, "embeddings": {"model_id": "hash-64", "fallback_dim": 64, "table": {}}}, f,
                  indent=1)
        f.write("\n")
    with open(HERE / "config.json", "w") as f:
        json.dump({"backend": "mock", "mock_script": "mock.json", "chat_model": "judge-mock",
                   "concurrency": 4, "thresholds": {"high": 0.7, "low": 0.3}}, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
