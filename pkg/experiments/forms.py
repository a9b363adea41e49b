"""
Experiment configuration: an INI file with sections [grid], [flow],
[initial], [run], [diagnostics] and [output], each validated by a form.
"""
import configparser
from dataclasses import asdict, dataclass, field
from pathlib import Path

from django import forms
from django.conf import settings

from advection.flows import FLOWS, velocity_library
from advection.patterns import PATTERNS, make_pattern
from mixing.certificates import conjugate_exponent
from spectral.grid import BOX, KINDS, make_grid

from dcommutator.checks import CALIBRATION_MODES, RATE

SECTIONS = ('grid', 'flow', 'initial', 'run', 'diagnostics', 'output')
RANDOMIZED = 'random'


class ConfigError(ValueError):
    """Raised for unreadable or invalid experiment configs."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class IniBooleanField(forms.BooleanField):
    """yes/no, on/off, true/false, 1/0 as configparser reads them."""

    widget = forms.TextInput

    def to_python(self, value):
        if isinstance(value, bool):
            return value
        if value in (None, ''):
            return False
        try:
            return configparser.ConfigParser.BOOLEAN_STATES[str(value).strip().lower()]
        except KeyError:
            raise forms.ValidationError(f"expected yes/no, got {value!r}") from None


class NumberListField(forms.CharField):
    """Comma-separated numbers."""

    def __init__(self, *, cast=float, **kwargs):
        self.cast = cast
        kwargs.setdefault('required', False)
        super().__init__(**kwargs)

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return []
        try:
            return [self.cast(item.strip()) for item in value.split(',') if item.strip()]
        except ValueError:
            raise forms.ValidationError(f"expected comma-separated numbers, got {value!r}") from None


class GridForm(forms.Form):
    d = forms.TypedChoiceField(choices=[(1, '1'), (2, '2')], coerce=int)
    kind = forms.ChoiceField(choices=[(k, k) for k in KINDS], initial='torus', required=False)
    N = forms.IntegerField(min_value=4)
    R = forms.FloatField(required=False, min_value=0.0)

    def clean(self):
        data = super().clean()
        data['kind'] = data.get('kind') or 'torus'
        if data['kind'] == BOX and not data.get('R'):
            self.add_error('R', "box grids need R > 0")
        if data['kind'] != BOX and data.get('R'):
            self.add_error('R', "torus grids take no R")
        return data


class FlowForm(forms.Form):
    name = forms.ChoiceField(choices=[(name, name) for name in sorted(FLOWS)])
    amplitude = forms.FloatField(required=False)
    period = forms.FloatField(required=False, min_value=0.0)
    velocity = NumberListField()
    seed = forms.IntegerField(required=False, min_value=0)
    kmax = forms.IntegerField(required=False, min_value=1)
    target = forms.FloatField(required=False, min_value=0.0)
    interval = forms.FloatField(required=False, min_value=0.0)


class InitialForm(forms.Form):
    pattern = forms.ChoiceField(choices=[(name, name) for name in sorted(PATTERNS)])
    amplitude = forms.FloatField(required=False)
    mode = NumberListField(cast=int)
    mean = forms.FloatField(required=False)
    m = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(required=False, min_value=0)
    kmax = forms.IntegerField(required=False, min_value=1)
    mean_zero = IniBooleanField(required=False)
    norm = forms.FloatField(required=False, min_value=0.0)
    radius = forms.IntegerField(required=False, min_value=1)
    width = forms.FloatField(required=False, min_value=0.0)


class RunForm(forms.Form):
    horizon = forms.FloatField(min_value=0.0)
    sample_dt = forms.FloatField(required=False, min_value=0.0)
    dt = forms.FloatField(required=False, min_value=0.0)
    p = forms.FloatField(required=False, min_value=1.0)
    seed = forms.IntegerField(required=False, min_value=0)

    def clean(self):
        data = super().clean()
        horizon = data.get('horizon')
        if horizon and not data.get('sample_dt'):
            self.add_error('sample_dt', "sample_dt > 0 is required when horizon > 0")
        return data


class DiagnosticsForm(forms.Form):
    v = IniBooleanField(required=False)
    w = IniBooleanField(required=False)
    s = NumberListField()
    positive_s = NumberListField()
    kappa = forms.FloatField(required=False, min_value=0.0, max_value=1.0)
    B = forms.FloatField(required=False)
    dvdt_check = IniBooleanField(required=False)
    certificates = IniBooleanField(required=False)
    certificate_s = forms.FloatField(required=False, min_value=0.0)
    calibration = forms.ChoiceField(choices=[(m, m) for m in CALIBRATION_MODES], required=False)

    def clean_kappa(self):
        kappa = self.cleaned_data.get('kappa')
        if kappa is not None and not 0 < kappa < 1:
            raise forms.ValidationError("kappa must lie strictly between 0 and 1")
        return kappa

    def clean_B(self):
        B = self.cleaned_data.get('B')
        if B is not None and not B > 1:
            raise forms.ValidationError("B must exceed 1")
        return B

    def clean_s(self):
        values = self.cleaned_data['s']
        if any(s <= 0 for s in values):
            raise forms.ValidationError("negative Sobolev orders are listed as positive s")
        return values


class OutputForm(forms.Form):
    directory = forms.CharField(required=False)
    snapshots = IniBooleanField(required=False)


SECTION_FORMS = {
    'grid': GridForm,
    'flow': FlowForm,
    'initial': InitialForm,
    'run': RunForm,
    'diagnostics': DiagnosticsForm,
    'output': OutputForm,
}

DIAGNOSTIC_DEFAULTS = {'v': True, 'w': True, 's': [1.0], 'certificate_s': 1.0, 'calibration': RATE}


def _drop_empty(data):
    return {key: value for key, value in data.items() if value not in (None, '', [])}


@dataclass
class ExperimentConfig:
    grid: dict
    flow: dict
    initial: dict
    run: dict
    diagnostics: dict
    output: dict
    source: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.run.get('seed')

    @property
    def p(self):
        return float(self.run.get('p') or 2.0)

    def with_seed(self, seed, override=True):
        """
        Copy with the [run] seed set. Randomized components take it when they
        have no seed of their own, or always when `override` is set.
        """
        if seed is None:
            return self
        run = {**self.run, 'seed': int(seed)}
        flow = dict(self.flow)
        initial = dict(self.initial)
        if flow['name'] == RANDOMIZED and (override or flow.get('seed') is None):
            flow['seed'] = int(seed)
        if initial['pattern'] == RANDOMIZED and (override or initial.get('seed') is None):
            initial['seed'] = int(seed)
        return ExperimentConfig(self.grid, flow, initial, run, self.diagnostics, self.output, self.source)

    def build_grid(self):
        return make_grid(self.grid['d'], self.grid['kind'], self.grid['N'], self.grid.get('R'))

    def build_flow(self, grid):
        params = {key: value for key, value in self.flow.items() if key != 'name'}
        if 'velocity' in params:
            params['velocity'] = tuple(params['velocity'])
        if self.flow['name'] == RANDOMIZED:
            params.setdefault('p', self.p)
        return velocity_library(self.flow['name'], grid, **params)

    def build_initial(self, grid):
        params = {key: value for key, value in self.initial.items() if key != 'pattern'}
        if 'mode' in params:
            params['mode'] = tuple(params['mode'])
        return make_pattern(self.initial['pattern'], grid, **params)

    def output_directory(self, override=None):
        if override:
            return Path(override)
        if self.output.get('directory'):
            return Path(self.output['directory'])
        return Path(settings.MIXLOG['RESULTS_DIR']) / 'simulate'

    def as_dict(self):
        return asdict(self)


def _read(text, source):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or '<config>')
    except configparser.ParsingError as exc:
        line, content = exc.errors[0]
        raise ConfigError(f"cannot parse {content.strip()!r}", line=line) from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message, line=exc.lineno) from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing [section] header", line=exc.lineno) from exc
    return parser


def _validate_section(parser, name):
    form_class = SECTION_FORMS[name]
    raw = dict(parser.items(name)) if parser.has_section(name) else {}
    unknown = sorted(set(raw) - set(form_class.base_fields))
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown option")
    form = form_class(data=raw)
    if not form.is_valid():
        key, errors = next(iter(form.errors.items()))
        where = name if key == '__all__' else f"{name}.{key}"
        raise ConfigError(f"{where}: {errors[0]}")
    if name == 'grid':
        return form.cleaned_data
    required = {key for key, f in form.fields.items() if f.required}
    return _drop_empty({key: form.cleaned_data[key] for key in set(raw) | required})


def parse_config(text, source=None):
    parser = _read(text, source)
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{section}: unknown section")
    for required in ('grid', 'flow', 'initial', 'run'):
        if not parser.has_section(required):
            raise ConfigError(f"{required}: missing section")

    sections = {name: _validate_section(parser, name) for name in SECTIONS}
    sections['diagnostics'] = {**DIAGNOSTIC_DEFAULTS, **sections['diagnostics']}
    config = ExperimentConfig(source=source, **sections)
    config = config.with_seed(config.seed, override=False)

    if config.flow['name'] == RANDOMIZED and config.flow.get('seed') is None:
        raise ConfigError("flow.seed: the random flow needs a seed")
    if config.initial['pattern'] == RANDOMIZED and config.initial.get('seed') is None:
        raise ConfigError("initial.seed: the random pattern needs a seed")
    if config.diagnostics.get('certificates'):
        conjugate_exponent(config.p)
    return config


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))
