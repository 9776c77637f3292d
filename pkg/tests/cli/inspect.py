import os

def test(self):
    tmp = self.tmp_dir()
    path = os.path.join(tmp, 'in.jsonl')
    with open(path, 'w') as f:
        f.write('{"id": "right", "label": 1, "logits": [1, 4, 3, 2, 0, -1]}\n')
        f.write('{"id": "wrong", "label": 3, "logits": [1, 4, 3, 2, 0, -1]}\n')
        f.write('{"id": "tie", "label": 2, "logits": [0, 5, 5]}\n')
    status, main = self.run('sortkd-inspect', records_in=path, top=5, confusion=True)
    assert status == 0
    assert main.total == 3
    assert main.misclassified == 1

    status, main = self.run('sortkd-inspect', records_in=path, top=1, temperature=4.0, records=False)
    assert status == 0 and main.misclassified == 1

    status, main = self.run('sortkd-inspect', records_in=path, top=0)
    assert status == 1
    status, main = self.run('sortkd-inspect', records_in=path, temperature=0.0)
    assert status == 1
    status, main = self.run('sortkd-inspect', records_in=os.path.join(tmp, 'missing.jsonl'))
    assert status == 2
