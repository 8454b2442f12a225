from django import forms
from django.conf import settings

from .exceptions import InvalidArgument
from .planner import PLANNER_NAMES
from .skb import Selection

TRUE_VALUES = ('true', 'yes', 'on', '1')
FALSE_VALUES = ('false', 'no', 'off', '0')


class SwitchField(forms.TypedChoiceField):
    """Boolean written as true/false (yes/no, on/off, 1/0) in config files."""

    def __init__(self, **kwargs):
        kwargs.setdefault('required', False)
        super().__init__(
            choices=[(value, value) for value in TRUE_VALUES + FALSE_VALUES],
            coerce=lambda value: value in TRUE_VALUES,
            empty_value=False,
            **kwargs,
        )

    def to_python(self, value):
        return super().to_python(value).strip().lower()


class IntegerListField(forms.CharField):
    def to_python(self, value):
        value = super().to_python(value)
        try:
            return [int(item) for item in value.split(',') if item.strip()]
        except ValueError:
            raise forms.ValidationError('Enter comma-separated integers.') from None


class SynthForm(forms.Form):
    c_total = forms.IntegerField(min_value=2, initial=20)
    c_seen_tx = forms.IntegerField(min_value=1, initial=10)
    c_seen_rx = forms.IntegerField(min_value=1, initial=10)
    d_v = forms.IntegerField(min_value=1, initial=64)
    d_s = forms.IntegerField(min_value=1, initial=16)
    n_per_class = forms.IntegerField(min_value=1, initial=40)
    n_test = forms.IntegerField(min_value=1, initial=64)
    noise_sigma = forms.FloatField(min_value=0.0, initial=0.05)
    orthonormal_map = SwitchField(initial='false')

    def clean(self):
        cleaned_data = super().clean()
        c_total = cleaned_data.get('c_total')
        seen = [cleaned_data.get('c_seen_tx'), cleaned_data.get('c_seen_rx')]
        if c_total is not None and None not in seen and max(seen) >= c_total:
            raise forms.ValidationError('Seen classes must leave at least one unseen class for testing.')
        d_v, d_s = cleaned_data.get('d_v'), cleaned_data.get('d_s')
        if cleaned_data.get('orthonormal_map') and d_v is not None and d_s is not None and d_s > d_v:
            self.add_error('orthonormal_map', 'An orthonormal map needs d_s <= d_v.')
        return cleaned_data


class ChannelForm(forms.Form):
    beta0_db = forms.FloatField(initial=-30.0)
    d0_m = forms.FloatField(initial=10.0)
    d_m = forms.FloatField(initial=500.0)
    zeta = forms.FloatField(min_value=0.0, initial=3.0)
    bandwidth_hz = forms.FloatField(initial=1e6)
    noise_dbm_per_hz = forms.FloatField(initial=-174.0)
    power_dbm = forms.FloatField(initial=10.0)
    q_bits = forms.IntegerField(min_value=1, initial=32)

    def _positive(self, name):
        value = self.cleaned_data[name]
        if value <= 0:
            raise forms.ValidationError('Must be positive.')
        return value

    def clean_d0_m(self):
        return self._positive('d0_m')

    def clean_d_m(self):
        return self._positive('d_m')

    def clean_bandwidth_hz(self):
        return self._positive('bandwidth_hz')


class ExtractorForm(forms.Form):
    k = forms.IntegerField(min_value=1, initial=8)
    lambda_tx = forms.FloatField(initial=1.0)
    lambda_rx = forms.FloatField(initial=1.0)
    shared = SwitchField(initial='true')

    def clean(self):
        cleaned_data = super().clean()
        for name in ('lambda_tx', 'lambda_rx'):
            value = cleaned_data.get(name)
            if value is not None and value <= 0:
                self.add_error(name, 'Must be positive.')
        return cleaned_data


class SkbForm(forms.Form):
    tx = forms.CharField(initial='full')
    rx = forms.CharField(initial='full')

    def _selection(self, name):
        try:
            return Selection.parse(self.cleaned_data[name])
        except InvalidArgument as exc:
            raise forms.ValidationError(str(exc)) from None

    def clean_tx(self):
        return self._selection('tx')

    def clean_rx(self):
        return self._selection('rx')


class PlannerForm(forms.Form):
    names = forms.CharField(initial=','.join(PLANNER_NAMES))
    tau = forms.CharField(initial='auto')
    brute_force_cap = forms.IntegerField(min_value=1, max_value=12, initial=settings.SKBMLFX['BRUTE_FORCE_CAP'])

    def clean_names(self):
        names = [name.strip() for name in self.cleaned_data['names'].split(',') if name.strip()]
        if not names:
            raise forms.ValidationError('Name at least one planner.')
        unknown = [name for name in names if name not in PLANNER_NAMES]
        if unknown:
            raise forms.ValidationError(f'Unknown planners {unknown}; choose from {list(PLANNER_NAMES)}.')
        return tuple(dict.fromkeys(names))

    def clean_tau(self):
        value = self.cleaned_data['tau'].strip().lower()
        if value == 'auto':
            return None
        try:
            tau = float(value)
        except ValueError:
            raise forms.ValidationError('Enter "auto" or a latency in seconds.') from None
        if not 0 < tau < float('inf'):
            raise forms.ValidationError('The latency budget must be a positive finite number.')
        return tau


class CccpForm(forms.Form):
    gamma0 = forms.FloatField(initial=0.05)
    gamma_growth = forms.FloatField(initial=2.0)
    restarts = forms.IntegerField(min_value=1, initial=16)
    tol = forms.FloatField(initial=1e-9)
    max_iters = forms.IntegerField(min_value=1, initial=100)
    polish = SwitchField(initial='false')

    def clean(self):
        cleaned_data = super().clean()
        for name, floor, message in (
            ('gamma0', 0.0, 'Must be positive.'),
            ('gamma_growth', 1.0, 'Must be greater than one.'),
            ('tol', 0.0, 'Must be positive.'),
        ):
            value = cleaned_data.get(name)
            if value is not None and value <= floor:
                self.add_error(name, message)
        return cleaned_data


class LagrangianForm(forms.Form):
    bisect_tol = forms.FloatField(initial=1e-9)
    max_steps = forms.IntegerField(min_value=1, initial=200)

    def clean_bisect_tol(self):
        value = self.cleaned_data['bisect_tol']
        if value <= 0:
            raise forms.ValidationError('Must be positive.')
        return value


class ExperimentForm(forms.Form):
    trials = forms.IntegerField(min_value=1, initial=10)
    base_seed = forms.IntegerField(min_value=0, initial=0)
    out_dir = forms.CharField(initial=str(settings.SKBMLFX['OUTPUT_DIR']))
    workers = forms.IntegerField(min_value=1, initial=1)
    timing = SwitchField(initial='false')


class SweepForm(forms.Form):
    side = forms.ChoiceField(choices=[('tx', 'tx'), ('rx', 'rx')], initial='rx')
    sizes = IntegerListField(initial='2,4,6,8,10')

    def clean_sizes(self):
        sizes = self.cleaned_data['sizes']
        if not sizes:
            raise forms.ValidationError('Give at least one knowledge-base size.')
        if min(sizes) < 1:
            raise forms.ValidationError('Knowledge-base sizes start at 1.')
        return sizes


SECTION_FORMS = {
    'synth': SynthForm,
    'channel': ChannelForm,
    'extractor': ExtractorForm,
    'skb': SkbForm,
    'planner': PlannerForm,
    'cccp': CccpForm,
    'lagrangian': LagrangianForm,
    'experiment': ExperimentForm,
    'sweep': SweepForm,
}
