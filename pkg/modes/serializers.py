from rest_framework import serializers

from tunnel_circuits.utils import parse_range, radians_to_degrees

MODEL_CHOICES = ['square', 'triangular']
CONSTANTS_CHOICES = ['si', 'paper']
FORMAT_CHOICES = ['csv', 'json']

# request names (CLI flags, API fields) → solver parameter names
PARAMETER_NAMES = {
    'energy': 'energy',
    'potential': 'barrier_height',
    'barrier_length': 'barrier_length',
    'theta': 'theta',
    'pre_barrier_length': 'pre_barrier_length',
}
REQUEST_NAMES = {service: request for request, service in PARAMETER_NAMES.items()}


def format_errors(errors):
    """Flatten serializer errors into one deterministic line."""
    parts = []
    for field, messages in errors.items():
        if isinstance(messages, dict):
            messages = [format_errors(messages)]
        for message in messages:
            parts.append(str(message) if field == 'non_field_errors' else f"{field}: {message}")
    return '; '.join(parts)


class FloatListField(serializers.ListField):
    """A list of floats, also accepted as a comma separated string (``0.5,1,1.5``)."""

    child = serializers.FloatField()

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [part for part in data.split(',') if part.strip()]
        return super().to_internal_value(data)


class RunConfigSerializer(serializers.Serializer):
    constants = serializers.ChoiceField(choices=CONSTANTS_CHOICES, required=False, allow_null=True)
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, required=False, allow_null=True)

    def validate_range(self, value):
        if value is None:
            return value
        try:
            parse_range(value)
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return value


class ModelParametersSerializer(RunConfigSerializer):
    model = serializers.ChoiceField(choices=MODEL_CHOICES)
    energy = serializers.FloatField(required=False, allow_null=True)
    potential = serializers.FloatField(required=False, allow_null=True)
    barrier_length = serializers.FloatField(required=False, allow_null=True)
    theta = serializers.FloatField(required=False, allow_null=True, help_text="degrees")
    pre_barrier_length = serializers.FloatField(
        required=False, allow_null=True,
        help_text="nm; square: signed coordinate a <= 0 where region I starts, triangular: length A > 0 of region I",
    )

    def check_coverage(self, attrs, free):
        provided = {name for name in PARAMETER_NAMES if attrs.get(name) is not None}
        if free is not None and free in provided:
            raise serializers.ValidationError({'free': f"{free} cannot be both fixed and free"})
        names = provided | ({free} if free else set())
        phase = names & {'theta', 'pre_barrier_length'}
        if not {'energy', 'potential', 'barrier_length'} <= names or len(phase) != 1:
            raise serializers.ValidationError(
                "parameters must cover energy, potential, barrier_length "
                "and exactly one of theta or pre_barrier_length"
            )


class SolveRequestSerializer(ModelParametersSerializer):
    free = serializers.ChoiceField(choices=list(PARAMETER_NAMES))
    range = serializers.CharField(help_text="lo:hi[:step], degrees when the free parameter is theta")
    steps = serializers.IntegerField(min_value=2, required=False, allow_null=True)

    def validate(self, attrs):
        self.check_coverage(attrs, attrs['free'])
        return attrs


class WavefunctionRequestSerializer(ModelParametersSerializer):
    free = serializers.ChoiceField(choices=list(PARAMETER_NAMES), required=False, allow_null=True)
    range = serializers.CharField(required=False, allow_null=True)
    branch = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    samples = serializers.IntegerField(min_value=2, required=False, allow_null=True)

    def validate(self, attrs):
        free = attrs.get('free')
        self.check_coverage(attrs, free)
        if free and not attrs.get('range'):
            raise serializers.ValidationError({'range': "a search range is required with a free parameter"})
        return attrs


class SweepRequestSerializer(RunConfigSerializer):
    energy = serializers.FloatField()
    potential = serializers.FloatField()
    b_values = FloatListField(required=False, allow_null=True, allow_empty=False)
    range = serializers.CharField(required=False, allow_null=True, help_text="lo:hi[:step] in nm")
    points = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    spacing = serializers.ChoiceField(choices=['linear', 'log'], required=False, allow_null=True)

    def validate(self, attrs):
        if bool(attrs.get('b_values')) == bool(attrs.get('range')):
            raise serializers.ValidationError("give either b_values or range")
        if attrs.get('range'):
            lo, _, step = parse_range(attrs['range'])
            if step is None and not attrs.get('points'):
                raise serializers.ValidationError({'points': "a range without a step needs a number of points"})
            if attrs.get('spacing') == 'log' and lo <= 0:
                raise serializers.ValidationError({'spacing': "log spacing needs a positive lower bound"})
        return attrs


class ScanRequestSerializer(RunConfigSerializer):
    energy = serializers.FloatField()
    potential = serializers.FloatField()
    barrier_length = serializers.FloatField()
    theta_values = FloatListField(required=False, allow_null=True, allow_empty=False, help_text="degrees")
    range = serializers.CharField(required=False, allow_null=True, help_text="lo:hi:step in degrees")

    def validate(self, attrs):
        if bool(attrs.get('theta_values')) == bool(attrs.get('range')):
            raise serializers.ValidationError("give either theta_values or range")
        if attrs.get('range') and parse_range(attrs['range'])[2] is None:
            raise serializers.ValidationError({'range': "a theta scan range needs a step"})
        return attrs


class ModeRootSerializer(serializers.Serializer):
    branch_index = serializers.IntegerField()
    free_parameter = serializers.SerializerMethodField()
    value = serializers.SerializerMethodField()
    theta_deg = serializers.SerializerMethodField()
    ka = serializers.SerializerMethodField()
    pre_barrier_length = serializers.SerializerMethodField()
    energy = serializers.SerializerMethodField()
    potential = serializers.SerializerMethodField()
    barrier_length = serializers.SerializerMethodField()
    residual = serializers.FloatField()

    def get_free_parameter(self, obj):
        if obj.free_parameter is None:
            return None
        return REQUEST_NAMES[obj.free_parameter.value]

    def get_value(self, obj): # the free parameter in request units
        if obj.free_parameter is None or obj.free_parameter.value == 'theta':
            return radians_to_degrees(obj.parameters['theta'])
        return obj.value

    def get_theta_deg(self, obj):
        return radians_to_degrees(obj.parameters['theta'])

    def get_ka(self, obj):
        return obj.parameters['theta']

    def get_pre_barrier_length(self, obj):
        return obj.parameters['pre_barrier_length']

    def get_energy(self, obj):
        return obj.parameters['energy']

    def get_potential(self, obj):
        return obj.parameters['barrier_height']

    def get_barrier_length(self, obj):
        return obj.parameters['barrier_length']


class SweepRowSerializer(serializers.Serializer):
    b = serializers.FloatField()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for index, point in enumerate(instance.branches):
            data[f'theta_deg_branch{index}'] = None if point is None else radians_to_degrees(point.theta)
            data[f'ka_branch{index}'] = None if point is None else point.ka
            data[f'a_branch{index}'] = None if point is None else point.a
        return data


class ScanRowSerializer(serializers.Serializer):
    theta_deg = serializers.SerializerMethodField()
    A = serializers.FloatField(source='a')
    B = serializers.FloatField(source='b')
    C = serializers.FloatField(source='c')
    determinant = serializers.FloatField()
    note = serializers.CharField()

    def get_theta_deg(self, obj):
        return radians_to_degrees(obj.theta)


class WavefunctionSampleSerializer(serializers.Serializer):
    x = serializers.FloatField()
    psi = serializers.FloatField()
    dpsi = serializers.FloatField()
    region = serializers.CharField()


class ModeReportSerializer(serializers.Serializer):
    root = ModeRootSerializer()
    coefficients = serializers.SerializerMethodField()
    nullspace_residual = serializers.FloatField(source='coefficients.residual')
    boundary_residuals = serializers.ListField(source='trace.boundary_residuals', child=serializers.FloatField())
    monodromy_residual = serializers.FloatField()
    samples = WavefunctionSampleSerializer(source='trace.samples', many=True)

    def get_coefficients(self, obj):
        return list(obj.coefficients.c)
