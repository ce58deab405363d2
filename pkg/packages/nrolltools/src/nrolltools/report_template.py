"""Default Jinja2 template for report.md."""

DEFAULT_REPORT_TEMPLATE = """# Run `{{ name }}`

- command: `{{ command }}`
- seed: {{ seed }}
- dataset: {{ dataset.kind }}{% if dataset.kind == "synthetic" %} ({{ dataset.classes }} classes x {{ dataset.per_class }}, d_in={{ dataset.d_in }}){% else %} ({{ dataset.path }}){% endif %}
- label noise: {{ "%.0f"|format(100 * noise.rate) }}% {{ noise.mode }}
- group: {{ group.agents }} agents, alpha={{ group.alpha }}, shuffle={{ "on" if group.shuffle else "off" }}, batch {{ group.batch_size }}
- noise rate estimate: {% if estimator.rate_mode == "sample" %}per-sample rate 1 - sqrt(1 - w) (`rate_mode: sample`){% else %}pair-level weight w (`rate_mode: pair`){% endif %}, where w is the weight of the low-similarity component of same-label pairs
{% if r_percent is not none %}- training noise rate r: {{ "%.2f"|format(r_percent) }}%
{% endif %}
{% if loops %}
## Loops

| t | labelled | r est (%) | r train (%) | added | dropped | threshold | pseudo acc | test acc | verification | rank-1 |
|---|---------:|----------:|------------:|------:|--------:|----------:|-----------:|---------:|-------------:|-------:|
{% for m in loops -%}
| {{ m.t }} | {{ m.labelled_size }} | {{ "%.2f"|format(m.r_est) }} | {{ "%.2f"|format(m.r_train) }} | {{ m.added }} | {{ m.dropped }} | {{ "%.3f"|format(m.threshold) }} | {{ pct(m.pseudo_acc) }} | {{ pct(m.test_acc) }} | {{ pct(m.verification_acc) }} | {{ pct(m.rank1) }} |
{% endfor %}
{% endif %}
{% if final %}
## Final evaluation (agent {{ agent_index }})

| metric | value |
|--------|------:|
| test accuracy | {{ pct(final.test_accuracy) }} |
| verification accuracy | {{ pct(final.verification_accuracy) }} |
| verification threshold | {{ "%.4f"|format(final.verification_threshold) }} |
{% for fpr, tpr in final.tpr_at_fpr.items() -%}
| TPR @ FPR={{ fpr }} | {{ pct(tpr) }} |
{% endfor -%}
| rank-1 | {{ pct(final.rank1) }} |
{% endif %}
{% if events %}
## Events

{% for e in events -%}
- {{ e }}
{% endfor %}
{% endif %}
"""
