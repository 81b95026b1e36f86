from rest_framework import serializers

import numpy as np

from .config import AnalysisConfig
from .core import SCHEMA_VERSION, EntityFailure, MarkerReport
from .corpus import CorpusSpec, parse_generator
from .entropy import EntropyVector
from .exceptions import MarkersError
from .series import MultiSeries, SparsityProfile
from .simplex import SimplexPoint
from .walk import (
    OUTSIDE_CHANGED_LEADING,
    OUTSIDE_SAME_LEADING,
    SYMBOLIZATION_MODES,
    WINDOW_KINDS,
    WITHIN,
    AttributionVerdict,
    EntropyWalk,
    Trend,
)
from .zipf import CATEGORIES, EQUIVALENCES, ComponentDiversification, Diversification, ZipfFit


def _floats(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), **kwargs)


class AnalysisConfigSerializer(serializers.Serializer):
    """Validates an AnalysisConfig; every field is required."""
    alphabet_size = serializers.IntegerField(min_value=2)
    differencing = serializers.BooleanField()
    window_kind = serializers.ChoiceField(choices=WINDOW_KINDS)
    window_length = serializers.IntegerField(min_value=1)
    window_step = serializers.IntegerField(min_value=1)
    window_count = serializers.IntegerField(min_value=1)
    window_seed = serializers.IntegerField(min_value=0)
    word_length = serializers.IntegerField(min_value=1)
    equivalence = serializers.ChoiceField(choices=EQUIVALENCES)
    rare_threshold = serializers.FloatField(min_value=0.0, max_value=1.0)
    sparsity_delta = serializers.FloatField(min_value=0.0, max_value=1.0)
    symbolization_mode = serializers.ChoiceField(choices=SYMBOLIZATION_MODES)

    def create(self, validated_data):
        return AnalysisConfig(**validated_data)


class CorpusSpecSerializer(serializers.Serializer):
    entity_count = serializers.IntegerField(min_value=1)
    component_count = serializers.IntegerField(min_value=2)
    length = serializers.IntegerField(min_value=2)
    generators = serializers.ListField(child=serializers.CharField(), min_length=1)
    seed = serializers.IntegerField(min_value=0)
    level = serializers.FloatField(min_value=0.0, default=100.0)

    def validate_generators(self, value):
        try:
            return [parse_generator(text) for text in value]
        except MarkersError as e:
            raise serializers.ValidationError(e.message)

    def validate(self, data):
        if len(data['generators']) not in (1, data['component_count']):
            raise serializers.ValidationError(
                "give one generator for all components or one per component"
            )
        return data

    def create(self, validated_data):
        generators = validated_data['generators']
        if len(generators) == 1:
            generators = generators * validated_data['component_count']
        return CorpusSpec(**{**validated_data, 'generators': tuple(generators)})


class ComponentSerializer(serializers.Serializer):
    label = serializers.CharField(allow_blank=True)
    values = _floats()


class MultiSeriesSerializer(serializers.Serializer):
    entity_id = serializers.CharField()
    components = ComponentSerializer(many=True)

    def create(self, validated_data):
        components = validated_data['components']
        return MultiSeries.from_arrays(
            validated_data['entity_id'],
            [c['values'] for c in components],
            [c['label'] for c in components],
        )


class SparsityProfileSerializer(serializers.Serializer):
    null_count = serializers.IntegerField()
    length = serializers.IntegerField()
    threshold_delta = serializers.FloatField()
    is_sparse = serializers.BooleanField()


class TrendSerializer(serializers.Serializer):
    leading_last = serializers.IntegerField()
    direction = _floats()
    line_point = _floats()
    mean_distance = serializers.FloatField()


class ZipfFitSerializer(serializers.Serializer):
    rho = serializers.FloatField()
    points_used = serializers.IntegerField()
    rare_threshold = serializers.FloatField()
    degenerate = serializers.BooleanField()


class ComponentDiversificationSerializer(serializers.Serializer):
    fit = ZipfFitSerializer()
    class_count = serializers.IntegerField()
    class_space = serializers.IntegerField()


class DiversificationSerializer(serializers.Serializer):
    value = serializers.FloatField()
    per_component_rho = _floats()
    category = serializers.ChoiceField(choices=CATEGORIES)
    components = ComponentDiversificationSerializer(many=True)


class SimplexPointSerializer(serializers.Serializer):
    coords = _floats()
    dimension = serializers.IntegerField()


class AttributionVerdictSerializer(serializers.Serializer):
    status = serializers.ChoiceField(choices=[WITHIN, OUTSIDE_SAME_LEADING, OUTSIDE_CHANGED_LEADING])
    distance = serializers.FloatField()
    threshold = serializers.FloatField()
    leading = serializers.IntegerField(allow_null=True)


class EntityFailureSerializer(serializers.Serializer):
    entity_id = serializers.CharField()
    kind = serializers.CharField()
    message = serializers.CharField()
    component = serializers.CharField(allow_null=True, required=False)

    def create(self, validated_data):
        return EntityFailure(**validated_data)


class MarkerReportSerializer(serializers.Serializer):
    """Versioned report schema; `save()` rebuilds the MarkerReport."""
    schema_version = serializers.IntegerField()
    entity_id = serializers.CharField()
    labels = serializers.ListField(child=serializers.CharField(allow_blank=True))
    leading = serializers.IntegerField()
    trend = TrendSerializer(allow_null=True)
    trend_error = EntityFailureSerializer(allow_null=True, required=False)
    diversification = DiversificationSerializer()
    entropy_vector = _floats(source='entropy_vector.values')
    entropy_raw = _floats(source='entropy_vector.raw_values')
    norm_euclidean = serializers.FloatField()
    norm_l1 = serializers.FloatField()
    grand_total = serializers.FloatField()
    sparsity = SparsityProfileSerializer(many=True)
    config_echo = serializers.DictField()
    walk = SimplexPointSerializer(many=True, source='walk.points')
    window_starts = serializers.ListField(child=serializers.IntegerField())
    attribution = AttributionVerdictSerializer(allow_null=True, required=False)
    holdout_point = SimplexPointSerializer(allow_null=True, required=False)
    parse_rule = serializers.CharField()
    cost_rule = serializers.CharField()

    def validate_schema_version(self, value):
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"unsupported schema version {value}")
        return value

    def create(self, validated_data):
        data = validated_data
        entity_id = data['entity_id']
        div = data['diversification']
        attribution = data.get('attribution')
        holdout_point = data.get('holdout_point')
        trend = data['trend']
        trend_error = data.get('trend_error')
        return MarkerReport(
            entity_id=entity_id,
            labels=tuple(data['labels']),
            leading=data['leading'],
            trend=Trend(
                leading_last=trend['leading_last'],
                direction=np.array(trend['direction']),
                line_point=np.array(trend['line_point']),
                mean_distance=trend['mean_distance'],
            ) if trend else None,
            trend_error=EntityFailure(**trend_error) if trend_error else None,
            diversification=Diversification(
                value=div['value'],
                per_component_rho=tuple(div['per_component_rho']),
                category=div['category'],
                components=tuple(
                    ComponentDiversification(
                        fit=ZipfFit(**c['fit']),
                        class_count=c['class_count'],
                        class_space=c['class_space'],
                    )
                    for c in div['components']
                ),
            ),
            entropy_vector=EntropyVector(
                data['entropy_vector']['values'],
                entity_id=entity_id,
                raw_values=data['entropy_vector']['raw_values'],
            ),
            norm_euclidean=data['norm_euclidean'],
            norm_l1=data['norm_l1'],
            grand_total=data['grand_total'],
            sparsity=tuple(SparsityProfile(**s) for s in data['sparsity']),
            config_echo=dict(data['config_echo']),
            walk=EntropyWalk(
                points=tuple(SimplexPoint(**p) for p in data['walk']['points']),
                entity_id=entity_id,
            ),
            window_starts=tuple(data['window_starts']),
            attribution=AttributionVerdict(**attribution) if attribution else None,
            holdout_point=SimplexPoint(**holdout_point) if holdout_point else None,
            parse_rule=data['parse_rule'],
            cost_rule=data['cost_rule'],
        )


class TotalPointSerializer(serializers.Serializer):
    entity_id = serializers.CharField()
    grand_total = serializers.FloatField()
    grand_total_normalized = serializers.FloatField()
    norm_euclidean = serializers.FloatField()


class CollectionSummarySerializer(serializers.Serializer):
    schema_version = serializers.SerializerMethodField()
    within_walk_fraction = serializers.FloatField(allow_null=True)
    attributed_count = serializers.IntegerField()
    within_count = serializers.IntegerField()
    changed_leading_count = serializers.IntegerField()
    same_leading_count = serializers.IntegerField()
    diversification_category_histogram = serializers.DictField(child=serializers.IntegerField())
    entropy_vs_total = TotalPointSerializer(many=True)
    failures = EntityFailureSerializer(many=True)
    config_echo = serializers.DictField()
    reports = MarkerReportSerializer(many=True)

    def get_schema_version(self, summary):
        return SCHEMA_VERSION


def report_from_payload(payload):
    serializer = MarkerReportSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def failure_from_payload(payload):
    serializer = EntityFailureSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return serializer.save()

